"""Contention-based random access model.

Per-attempt preamble detection follows the classic load curve 1 - e^-i for the
i-th transmission; the expected attempt count and the time/energy cost of the
whole RA phase (preamble, response window) are expectation values, matching
the deterministic style of the rest of the model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import phy
from .config import ConfigurationError, CoverageProfile, PowerProfile, UeState

# Random access opportunities recur every 40 ms; a UE with a pending attempt
# waits on average half a period for the next one.
RA_OPPORTUNITY_PERIOD_MS = 40.0
EXPECTED_OPPORTUNITY_WAIT_MS = RA_OPPORTUNITY_PERIOD_MS / 2.0


@dataclass(frozen=True)
class RaOutcome:
    expected_attempts: float
    expected_time_ms: float
    expected_energy_mj: float
    attempt_cap: int


def detection_probability(attempt: int) -> float:
    """Probability that the attempt-th preamble transmission is detected."""
    if attempt < 1:
        raise ConfigurationError(f"attempt={attempt}: must be >= 1")
    return 1.0 - math.exp(-float(attempt))


def expected_attempts(cap: int) -> float:
    """Expected number of preamble transmissions with at most cap attempts.

    Failure mass remaining after the cap is truncated: it is charged as cap
    attempts, not renormalized.  With this detection curve the expectation
    converges below 1.45 already for small caps.
    """
    if cap < 1:
        raise ConfigurationError(f"cap={cap}: must be >= 1")
    total = 0.0
    p_all_failed = 1.0
    for i in range(1, cap + 1):
        p_i = detection_probability(i)
        total += i * p_all_failed * p_i
        p_all_failed *= 1.0 - p_i
    total += cap * p_all_failed
    return total


def attempt_components(c: CoverageProfile, p: PowerProfile,
                       rar_bytes: int) -> list[tuple[str, UeState, float, float]]:
    """Per-attempt phases as (label, state, duration_ms, power_mw) tuples.

    One attempt: wait for the next RA opportunity, transmit the preamble with
    its repetitions, then receive the response (control assignment, scheduling
    gap, response block on the downlink shared channel).
    """
    preamble = phy.message_airtime(1, c, phy.ChannelKind.NPRACH)
    preamble_dbm = phy.nprach_tx_power_dbm(p, c.target_mcl_db, attempt=1)
    preamble_mw = phy.tx_power_consumption_mw(p, preamble_dbm)
    rar_cch = phy.message_airtime(1, c, phy.ChannelKind.NPDCCH)
    rar = phy.message_airtime(rar_bytes, c, phy.ChannelKind.NPDSCH)
    return [
        ("ra_wait", UeState.INACTIVE, EXPECTED_OPPORTUNITY_WAIT_MS, p.inactive_mw),
        ("preamble", UeState.TX, preamble.duration_ms, preamble_mw),
        ("rar_npdcch", UeState.RX, rar_cch.duration_ms, p.rx_mw),
        ("rar_gap", UeState.INACTIVE, phy.schedule_gap_ms(phy.ChannelKind.NPDSCH),
         p.inactive_mw),
        ("rar_npdsch", UeState.RX, rar.duration_ms, p.rx_mw),
    ]


def ra_cost(c: CoverageProfile, p: PowerProfile, cap: int = 10,
            rar_bytes: int = 7) -> RaOutcome:
    """Expected time and energy of the random access phase."""
    attempts = expected_attempts(cap)
    time_ms = 0.0
    energy_mj = 0.0
    for _, _, dur_ms, power_mw in attempt_components(c, p, rar_bytes):
        time_ms += dur_ms
        energy_mj += dur_ms * power_mw / 1000.0
    return RaOutcome(
        expected_attempts=attempts,
        expected_time_ms=attempts * time_ms,
        expected_energy_mj=attempts * energy_mj,
        attempt_cap=cap,
    )
