"""NB-IoT physical-layer accounting.

Turns message sizes into on-air durations under the Rel-13 numerology:
transport block segmentation against the TS 36.213 NPUSCH/NPDSCH TBS tables,
repetition scaling, NPDCCH scheduling periodicity, half-duplex scheduling
gaps, and the open-loop transmit-power formulas.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .config import CARRIER_KHZ, ConfigurationError, CoverageProfile, PowerProfile

SUBFRAME_MS = 1.0

# Start of a shared-channel transmission after the end of its associated NPDCCH.
NPUSCH_SCHEDULE_GAP_MS = 8.0
NPDSCH_SCHEDULE_GAP_MS = 4.0

# Allocation sizes of the TBS tables: N resource units (UL) / N subframes (DL).
ALLOCATION_UNITS = (1, 2, 3, 4, 5, 6, 8, 10)


class ChannelKind(str, enum.Enum):
    NPRACH = "NPRACH"
    NPUSCH = "NPUSCH"
    NPDCCH = "NPDCCH"
    NPDSCH = "NPDSCH"


class LinkDirection(str, enum.Enum):
    UL = "UL"
    DL = "DL"


@dataclass(frozen=True)
class Airtime:
    """Resource-accounting unit: on-air time and carrier fraction of one message."""

    duration_ms: float
    channel: ChannelKind
    ul_subcarrier_fraction: float   # 1.0 for full-carrier DL


# --- TBS table loading ------------------------------------------------------

def _data_text(name: str) -> str:
    return resources.files("nbiotsim").joinpath(f"data/{name}").read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def _checksums() -> dict[str, str]:
    out = {}
    for line in _data_text("CHECKSUMS").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        digest, fname = line.split()
        out[fname] = digest
    return out


def verified_data_text(name: str) -> str:
    """Read a packaged data file, verifying its pinned SHA-256 checksum."""
    text = _data_text(name)
    expected = _checksums().get(name)
    actual = hashlib.sha256(text.encode("utf-8")).hexdigest()
    if expected is None:
        raise ConfigurationError(f"data file {name!r} has no pinned checksum")
    if actual != expected:
        raise ConfigurationError(
            f"data file {name!r} checksum mismatch (got {actual}, pinned {expected}); "
            "update data/CHECKSUMS if the edit was intentional")
    return text


@lru_cache(maxsize=None)
def _tbs_table(direction: LinkDirection) -> tuple[tuple[int, ...], ...]:
    fname = "npusch_tbs.tsv" if direction is LinkDirection.UL else "npdsch_tbs.tsv"
    rows = []
    for line in verified_data_text(fname).splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = [int(c) for c in line.split()]
        if len(cells) != len(ALLOCATION_UNITS) + 1:
            raise ConfigurationError(f"{fname}: bad row {line!r}")
        rows.append(tuple(cells[1:]))
    return tuple(rows)


def tbs_bits(c: CoverageProfile, direction: LinkDirection, resource_units: int) -> int:
    """Transport block size in bits for the profile's MCS and an allocation size.

    resource_units counts NPUSCH resource units (UL) or NPDSCH subframes (DL)
    and must be one of the standard allocation sizes.
    """
    table = _tbs_table(direction)
    if not 0 <= c.mcs_index < len(table):
        raise ConfigurationError(f"mcs_index={c.mcs_index} outside the TBS table")
    if resource_units not in ALLOCATION_UNITS:
        raise ConfigurationError(
            f"resource_units={resource_units} not a valid allocation "
            f"(expected one of {ALLOCATION_UNITS})")
    return table[c.mcs_index][ALLOCATION_UNITS.index(resource_units)]


def transport_block_units(size_bits: int, c: CoverageProfile,
                          direction: LinkDirection) -> list[int]:
    """Allocation sizes of the transport blocks carrying a PDU of size_bits.

    Greedy segmentation: full maximum-TBS blocks first, then the smallest
    allocation whose TBS holds the remainder.
    """
    if size_bits <= 0:
        raise ConfigurationError("shared-channel message must have size > 0")
    table = _tbs_table(direction)
    row = table[c.mcs_index]
    max_tbs = row[-1]
    blocks = []
    remaining = size_bits
    while remaining > 0:
        if remaining >= max_tbs:
            blocks.append(ALLOCATION_UNITS[-1])
            remaining -= max_tbs
        else:
            for units, tbs in zip(ALLOCATION_UNITS, row):
                if tbs >= remaining:
                    blocks.append(units)
                    remaining = 0
                    break
    return blocks


# --- durations --------------------------------------------------------------

def npdcch_period_ms(c: CoverageProfile) -> int:
    """NPDCCH scheduling periodicity T = R_max * G in ms."""
    return c.npdcch_period_ms


def ul_resource_unit_ms(c: CoverageProfile) -> float:
    """Duration of one NPUSCH resource unit for the profile's subcarrier layout."""
    if c.subcarrier_spacing_khz == 3.75:
        return 32.0                      # single 3.75 kHz tone
    return {12: 1.0, 6: 2.0, 3: 4.0, 1: 8.0}[c.ul_subcarriers_per_burst]


def ul_carrier_fraction(c: CoverageProfile) -> float:
    """Fraction of the 180 kHz carrier an uplink burst occupies."""
    return c.ul_subcarriers_per_burst * c.subcarrier_spacing_khz / CARRIER_KHZ


def message_airtime(size_bytes: int, c: CoverageProfile, ch: ChannelKind) -> Airtime:
    """On-air duration of one message, repetitions included.

    NPUSCH/NPDSCH messages are segmented into transport blocks against the TBS
    tables; NPDCCH carries one control assignment (rep_npdcch subframes, format
    0 / aggregation level 2 fills a subframe); NPRACH duration is set by the
    preamble format and repetition count, independent of size.
    """
    if ch is ChannelKind.NPRACH:
        return Airtime(c.rep_nprach * c.nprach_preamble_ms, ch, 0.25)
    if ch is ChannelKind.NPDCCH:
        return Airtime(c.rep_npdcch * SUBFRAME_MS, ch, 1.0)
    if size_bytes <= 0:
        raise ConfigurationError("shared-channel message must have size > 0")
    bits = size_bytes * 8
    if ch is ChannelKind.NPUSCH:
        units = transport_block_units(bits, c, LinkDirection.UL)
        duration = sum(units) * ul_resource_unit_ms(c) * c.rep_npusch
        return Airtime(duration, ch, ul_carrier_fraction(c))
    if ch is ChannelKind.NPDSCH:
        units = transport_block_units(bits, c, LinkDirection.DL)
        duration = sum(units) * SUBFRAME_MS * c.rep_npdsch
        return Airtime(duration, ch, 1.0)
    raise ConfigurationError(f"unknown channel {ch}")


def schedule_gap_ms(ch: ChannelKind) -> float:
    """Gap between the end of an NPDCCH assignment and its shared-channel start."""
    if ch is ChannelKind.NPUSCH:
        return NPUSCH_SCHEDULE_GAP_MS
    if ch is ChannelKind.NPDSCH:
        return NPDSCH_SCHEDULE_GAP_MS
    raise ConfigurationError(f"no schedule gap defined for {ch}")


# --- transmit power ---------------------------------------------------------

def npusch_tx_power_dbm(c: CoverageProfile, p: PowerProfile, pathloss_db: float) -> float:
    """NPUSCH transmit power per TS 36.213 16.2.1.1.1.

    With more than two repetitions the UE transmits at the configured maximum;
    otherwise open-loop control with full or partial pathloss compensation,
    where M is the allocation size in 15 kHz subcarrier equivalents.
    """
    if c.rep_npusch > 2:
        return p.p_cmax_dbm
    m = c.ul_subcarriers_per_burst * c.subcarrier_spacing_khz / 15.0
    open_loop = 10.0 * math.log10(m) + p.p_o_npusch_dbm + p.alpha * pathloss_db
    return min(p.p_cmax_dbm, open_loop)


def nprach_tx_power_dbm(p: PowerProfile, pathloss_db: float, attempt: int = 1) -> float:
    """NPRACH preamble transmit power per TS 36.213 16.3.1."""
    if attempt < 1:
        raise ConfigurationError(f"attempt={attempt}: must be >= 1")
    target = (p.initial_received_target_power_dbm + p.delta_preamble_db
              + (attempt - 1) * p.power_ramping_step_db)
    return min(p.p_cmax_dbm, target + pathloss_db)


def tx_power_consumption_mw(p: PowerProfile, radiated_dbm: float) -> float:
    """UE power draw while transmitting at a given radiated power.

    Linear PA model anchored at the two known points: the maximum-power draw at
    p_cmax and the inactive floor at zero radiated power.
    """
    if radiated_dbm > p.p_cmax_dbm + 1e-9:
        raise ConfigurationError(
            f"radiated_dbm={radiated_dbm} exceeds p_cmax={p.p_cmax_dbm}")
    if radiated_dbm >= p.p_cmax_dbm - 1e-12:
        return p.tx_max_mw
    radiated_mw = 10.0 ** (radiated_dbm / 10.0)
    p_cmax_mw = 10.0 ** (p.p_cmax_dbm / 10.0)
    return p.inactive_mw + (p.tx_max_mw - p.inactive_mw) * (radiated_mw / p_cmax_mw)
