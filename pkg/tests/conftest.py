"""Shared fixtures and independent verification helpers."""

from __future__ import annotations

import pytest

from nbiotsim import Scenario, builtin_coverage_profile
from nbiotsim.config import Procedure, TrafficCase


def make_scenario(proc="CP", case="UL", cov="Normal", iat_h=1.0, **kw) -> Scenario:
    return Scenario(procedure=Procedure(proc), traffic_case=TrafficCase(case),
                    coverage=builtin_coverage_profile(cov), iat_s=iat_h * 3600.0, **kw)


def binned_energy_mj(timeline, bin_ms=1.0):
    """Re-integrate a timeline over fixed time bins (independent of the
    closed-form per-interval integration): for every bin, accumulate the exact
    overlap with each interval times its power."""
    if not timeline:
        return 0.0
    bin_us = int(bin_ms * 1000)
    end_us = timeline[-1].start_us + timeline[-1].duration_us
    total = 0.0
    idx = 0
    for bin_start in range(0, end_us, bin_us):
        bin_end = min(bin_start + bin_us, end_us)
        while idx < len(timeline) and timeline[idx].end_us <= bin_start:
            idx += 1
        j = idx
        while j < len(timeline) and timeline[j].start_us < bin_end:
            iv = timeline[j]
            overlap = min(bin_end, iv.end_us) - max(bin_start, iv.start_us)
            if overlap > 0:
                total += iv.power_mw * overlap * 1e-6
            j += 1
    return total


@pytest.fixture(scope="session")
def base_scenario() -> Scenario:
    return Scenario()
