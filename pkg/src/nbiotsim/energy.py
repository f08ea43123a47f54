"""Energy integration, long-run average power, and battery lifetime.

Integrates the cycle timeline against the state powers.  One cycle spans one
inter-arrival period including its share of periodic tracking-area updates:
uplink cases amortize one TAU per TAU period, downlink cases carry the TAU
inside the flow (the TAU is what makes the UE reachable).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import flows
from .config import HOURS_PER_YEAR, Reachability, Scenario, validate_scenario
from .flows import EnergyCategory, Interval


@dataclass(frozen=True)
class EnergyBreakdown:
    """Millijoules per traffic cycle, by consumption category."""

    ra_sync_mj: float
    post_ra_messages_mj: float
    connected_drx_mj: float
    idle_drx_mj: float
    psm_mj: float

    @property
    def drx_mj(self) -> float:
        return self.connected_drx_mj + self.idle_drx_mj

    @property
    def total_mj(self) -> float:
        return (self.ra_sync_mj + self.post_ra_messages_mj
                + self.connected_drx_mj + self.idle_drx_mj + self.psm_mj)

    def share(self, *categories: str) -> float:
        """Fraction of the cycle total attributed to the named categories."""
        value = sum(getattr(self, f"{name}_mj") if name != "drx" else self.drx_mj
                    for name in categories)
        return value / self.total_mj


def interval_energy_mj(iv: Interval) -> float:
    # mW * us = nJ; 1e-6 converts to mJ
    return iv.power_mw * iv.duration_us * 1e-6


def integrate_timeline(timeline: list[Interval]) -> dict[EnergyCategory, float]:
    out = {cat: 0.0 for cat in EnergyCategory}
    for iv in timeline:
        out[iv.category] += interval_energy_mj(iv)
    return out


def _amortized_tau(s: Scenario) -> tuple[dict[EnergyCategory, float], float]:
    """Per-cycle share of the standalone periodic TAU (uplink cases only)."""
    zero = {cat: 0.0 for cat in EnergyCategory}
    if s.traffic_case.mobile_terminated:
        return zero, 0.0            # TAU rides inside the downlink flows
    if s.mt_reachability is not Reachability.PSM_TAU:
        return zero, 0.0            # paging reachability: no periodic TAU modeled
    fraction = s.iat_s / s.timers.psm_tau_period_s
    tau_flow = flows.build_tau_flow(s)
    timeline = flows.flow_timeline(tau_flow, s, fill_psm_to_iat=False)
    cats = integrate_timeline(timeline)
    scaled = {cat: value * fraction for cat, value in cats.items()}
    active_s = flows.active_duration_s(timeline) * fraction
    return scaled, active_s


def cycle_energy(s: Scenario) -> EnergyBreakdown:
    """Energy of one inter-arrival period, split by category.

    The amortized TAU is a separate wake-up event: its idle-DRX window is
    charged to the wake-up (ra_sync) category, so the idle-DRX field always
    reflects the cycle's own reachability window, which is zero whenever
    release assistance applies.
    """
    validate_scenario(s)
    timeline = flows.flow_timeline(flows.build_flow(s), s)
    cats = integrate_timeline(timeline)
    tau_cats, tau_active_s = _amortized_tau(s)
    for cat in EnergyCategory:
        if cat is EnergyCategory.IDLE_DRX:
            cats[EnergyCategory.RA_SYNC] += tau_cats[cat]
        else:
            cats[cat] += tau_cats[cat]
    # The amortized TAU's active time is spent awake, not in deep sleep.
    cats[EnergyCategory.PSM] = max(
        0.0, cats[EnergyCategory.PSM] - tau_active_s * s.power.deep_sleep_mw)
    return EnergyBreakdown(
        ra_sync_mj=cats[EnergyCategory.RA_SYNC],
        post_ra_messages_mj=cats[EnergyCategory.MESSAGES],
        connected_drx_mj=cats[EnergyCategory.CONNECTED_DRX],
        idle_drx_mj=cats[EnergyCategory.IDLE_DRX],
        psm_mj=cats[EnergyCategory.PSM],
    )


def average_power_w(s: Scenario) -> float:
    """Long-run average UE power draw in watts."""
    return cycle_energy(s).total_mj / 1000.0 / s.iat_s


def battery_lifetime_years(s: Scenario) -> float:
    """Battery lifetime in years at the scenario's long-run average power."""
    return s.battery_wh / average_power_w(s) / HOURS_PER_YEAR


def psm_baseline_lifetime_years(s: Scenario) -> float:
    """Lifetime of a traffic-free UE that only deep-sleeps (the PSM floor)."""
    return s.battery_wh / (s.power.deep_sleep_mw / 1000.0) / HOURS_PER_YEAR
