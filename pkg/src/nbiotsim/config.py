"""Scenario model for NB-IoT small-data transfers.

Defines the three coverage enhancement profiles, the UE power model, DRX/PSM
timer configuration, the traffic model, scenario validation, and a key=value
scenario file format.  Every other module consumes only these types.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

# Rel-13 bounds on the power-saving timers
MAX_IDLE_DRX_CYCLE_S = 2.91 * 3600.0
MAX_PSM_TIME_S = 310.0 * 3600.0

HOURS_PER_YEAR = 8760.0
CARRIER_KHZ = 180.0


class ConfigurationError(ValueError):
    """Unknown profile name, malformed scenario file, or invalid parameter."""


class Procedure(str, enum.Enum):
    SR = "SR"   # legacy Service Request
    CP = "CP"   # control-plane optimization (data in NAS)
    UP = "UP"   # user-plane optimization (suspend/resume)


class TrafficCase(str, enum.Enum):
    UL = "UL"
    UL_ACK = "UL_ACK"
    DL = "DL"
    DL_ACK = "DL_ACK"

    @property
    def mobile_terminated(self) -> bool:
        return self in (TrafficCase.DL, TrafficCase.DL_ACK)

    @property
    def has_uplink_data(self) -> bool:
        # DL_ACK replies with an uplink report, so it carries uplink data too.
        return self in (TrafficCase.UL, TrafficCase.UL_ACK, TrafficCase.DL_ACK)


class Reachability(str, enum.Enum):
    PSM_TAU = "PSM_TAU"        # deep sleep; network reaches the UE at periodic TAU
    DRX_PAGING = "DRX_PAGING"  # idle DRX; network pages the UE


class Modulation(str, enum.Enum):
    QPSK = "QPSK"
    BPSK = "BPSK"


class UeState(str, enum.Enum):
    DEEP_SLEEP = "deep_sleep"
    INACTIVE = "inactive"
    RX = "rx"
    TX = "tx"


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class CoverageProfile:
    """Radio configuration of one coverage enhancement level."""

    name: str
    target_mcl_db: float
    subcarrier_spacing_khz: float        # 15 or 3.75
    ul_subcarriers_per_burst: int
    modulation: Modulation
    mcs_index: int
    rep_npdcch: int
    rep_npdsch: int
    rep_npusch: int
    rep_nprach: int
    r_max: int                            # NPDCCH search space size
    g_factor: float
    resource_share: float = 0.33          # slice of cell resources for this level
    sync_time_scale: float = 1.0          # multiplies the scenario's sync time
    nprach_preamble_ms: float = 6.4       # preamble format 1: 4 symbol groups of 1.6 ms

    @property
    def npdcch_period_ms(self) -> int:
        """NPDCCH search-space periodicity T = R_max * G, in whole ms."""
        period = self.r_max * self.g_factor
        if abs(period - round(period)) > 1e-9:
            raise ConfigurationError(
                f"r_max * g_factor = {period} ms is not a whole number of ms")
        return int(round(period))

    def violations(self) -> list[str]:
        out = []
        for fname in ("rep_npdcch", "rep_npdsch", "rep_npusch", "rep_nprach"):
            rep = getattr(self, fname)
            if not _is_power_of_two(rep) or rep > 2048:
                out.append(f"{fname}={rep}: repetitions must be a power of two in [1, 2048]")
        if not (0.0 < self.resource_share <= 1.0):
            out.append(f"resource_share={self.resource_share}: must be in (0, 1]")
        if self.subcarrier_spacing_khz not in (15.0, 3.75):
            out.append(f"subcarrier_spacing_khz={self.subcarrier_spacing_khz}: must be 15 or 3.75")
        if self.subcarrier_spacing_khz == 3.75 and self.ul_subcarriers_per_burst != 1:
            out.append("subcarrier_spacing_khz=3.75 requires ul_subcarriers_per_burst=1")
        if self.ul_subcarriers_per_burst not in (1, 3, 6, 12):
            out.append(f"ul_subcarriers_per_burst={self.ul_subcarriers_per_burst}: "
                       "must be one of 1, 3, 6, 12")
        if self.mcs_index < 0:
            out.append(f"mcs_index={self.mcs_index}: must be >= 0")
        try:
            self.npdcch_period_ms
        except ConfigurationError as exc:
            out.append(str(exc))
        return out


# Coverage levels with their link budget and channel configuration.
_BUILTIN_COVERAGE = {
    "Normal": CoverageProfile(
        name="Normal", target_mcl_db=144.0, subcarrier_spacing_khz=15.0,
        ul_subcarriers_per_burst=12, modulation=Modulation.QPSK, mcs_index=9,
        rep_npdcch=1, rep_npdsch=1, rep_npusch=2, rep_nprach=1,
        r_max=1, g_factor=32.0, sync_time_scale=1.0),
    "Robust": CoverageProfile(
        name="Robust", target_mcl_db=154.0, subcarrier_spacing_khz=15.0,
        ul_subcarriers_per_burst=3, modulation=Modulation.QPSK, mcs_index=3,
        rep_npdcch=64, rep_npdsch=32, rep_npusch=16, rep_nprach=8,
        r_max=64, g_factor=1.5, sync_time_scale=2.0),
    "Extreme": CoverageProfile(
        name="Extreme", target_mcl_db=161.0, subcarrier_spacing_khz=3.75,
        ul_subcarriers_per_burst=1, modulation=Modulation.BPSK, mcs_index=0,
        rep_npdcch=512, rep_npdsch=256, rep_npusch=1, rep_nprach=32,
        r_max=512, g_factor=1.5, sync_time_scale=4.0),
}

COVERAGE_NAMES = tuple(_BUILTIN_COVERAGE)


def builtin_coverage_profile(name: str) -> CoverageProfile:
    """Return one of the built-in coverage levels (Normal, Robust, Extreme)."""
    try:
        return _BUILTIN_COVERAGE[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown coverage profile {name!r}; expected one of {', '.join(COVERAGE_NAMES)}"
        ) from None


@dataclass(frozen=True)
class PowerProfile:
    """UE power draw per radio state plus open-loop power-control parameters.

    State powers follow the usual NB-IoT UE assumptions (RP-151393); the
    power-control parameters feed the NPUSCH/NPRACH formulas of TS 36.213.
    """

    deep_sleep_mw: float = 0.015
    inactive_mw: float = 3.0
    rx_mw: float = 90.0
    tx_max_mw: float = 545.0
    p_cmax_dbm: float = 23.0              # power class 3 cap
    p_o_npusch_dbm: float = -100.0
    alpha: float = 1.0
    initial_received_target_power_dbm: float = -100.0
    delta_preamble_db: float = 0.0
    power_ramping_step_db: float = 0.0

    def state_power_mw(self, state: UeState) -> float:
        return {
            UeState.DEEP_SLEEP: self.deep_sleep_mw,
            UeState.INACTIVE: self.inactive_mw,
            UeState.RX: self.rx_mw,
            UeState.TX: self.tx_max_mw,
        }[state]

    def violations(self) -> list[str]:
        out = []
        if not (0.0 < self.deep_sleep_mw < self.inactive_mw < self.rx_mw < self.tx_max_mw):
            out.append("state powers must satisfy 0 < deep_sleep < inactive < rx < tx_max "
                       f"(got {self.deep_sleep_mw}, {self.inactive_mw}, "
                       f"{self.rx_mw}, {self.tx_max_mw} mW)")
        if not (0.0 <= self.alpha <= 1.0):
            out.append(f"alpha={self.alpha}: must be in [0, 1]")
        return out


@dataclass(frozen=True)
class TrafficModel:
    """Application report and acknowledgment sizes."""

    data_payload_bytes: int = 20
    protocol_overhead_bytes: int = 44
    ack_payload_bytes: int = 0

    @property
    def data_message_bytes(self) -> int:
        return self.data_payload_bytes + self.protocol_overhead_bytes

    @property
    def ack_message_bytes(self) -> int:
        return self.ack_payload_bytes + self.protocol_overhead_bytes

    def violations(self) -> list[str]:
        out = []
        if self.data_payload_bytes < 0:
            out.append(f"data_payload_bytes={self.data_payload_bytes}: must be >= 0")
        if self.ack_payload_bytes < 0:
            out.append(f"ack_payload_bytes={self.ack_payload_bytes}: must be >= 0")
        if self.protocol_overhead_bytes <= 0:
            out.append(f"protocol_overhead_bytes={self.protocol_overhead_bytes}: must be > 0")
        return out


@dataclass(frozen=True)
class TimerConfig:
    """DRX/PSM timer configuration.

    The connected-state inactivity timer is 0 for UP/SR and a number of NPDCCH
    periods for CP; the idle-state active timer is base + 2 long DRX cycles,
    where one long cycle is drx_long_cycle_base_s plus one NPDCCH period.
    """

    cp_inactivity_npdcch_periods: int = 5
    idle_active_timer_base_s: float = 10.0
    drx_long_cycle_base_s: float = 2.048
    psm_tau_period_s: float = 5 * 24 * 3600.0   # periodic TAU every 5 days

    def violations(self, coverage: CoverageProfile) -> list[str]:
        out = []
        cycle = self.drx_long_cycle_base_s + coverage.npdcch_period_ms / 1000.0
        if cycle > MAX_IDLE_DRX_CYCLE_S:
            out.append(f"idle DRX cycle {cycle:.3f} s exceeds the "
                       f"{MAX_IDLE_DRX_CYCLE_S / 3600.0:.2f} h maximum")
        if self.psm_tau_period_s > MAX_PSM_TIME_S:
            out.append(f"psm_tau_period_s={self.psm_tau_period_s:.0f} s exceeds the "
                       f"{MAX_PSM_TIME_S / 3600.0:.0f} h PSM maximum")
        if self.psm_tau_period_s <= 0:
            out.append(f"psm_tau_period_s={self.psm_tau_period_s}: must be > 0")
        if self.cp_inactivity_npdcch_periods < 0:
            out.append("cp_inactivity_npdcch_periods must be >= 0")
        if self.idle_active_timer_base_s < 0:
            out.append("idle_active_timer_base_s must be >= 0")
        if self.drx_long_cycle_base_s <= 0:
            out.append("drx_long_cycle_base_s must be > 0")
        return out


@dataclass(frozen=True)
class Scenario:
    """One evaluation point: procedure, traffic case, coverage, and parameters."""

    procedure: Procedure = Procedure.CP
    traffic_case: TrafficCase = TrafficCase.UL
    coverage: CoverageProfile = field(
        default_factory=lambda: builtin_coverage_profile("Normal"))
    iat_s: float = 3600.0
    traffic: TrafficModel = field(default_factory=TrafficModel)
    power: PowerProfile = field(default_factory=PowerProfile)
    timers: TimerConfig = field(default_factory=TimerConfig)
    battery_wh: float = 5.0
    mt_reachability: Reachability = Reachability.PSM_TAU

    # model knobs
    sync_base_ms: float = 330.0           # cell-search time at Normal coverage
    ra_attempt_cap: int = 10              # maximum preamble transmissions
    rar_bytes: int = 7                    # random access response MAC PDU

    # cell resource budget overrides (units/s before coverage sharing);
    # None selects the documented defaults in the capacity module
    budget_npdcch_sf_per_s: float | None = None
    budget_npdsch_sf_per_s: float | None = None
    budget_npusch_sc_ms_per_s: float | None = None
    budget_nprach_slots_per_s: float | None = None

    # --- resolved timers -------------------------------------------------

    @property
    def npdcch_period_ms(self) -> int:
        return self.coverage.npdcch_period_ms

    @property
    def idle_drx_cycle_s(self) -> float:
        """One long DRX cycle: off period plus one NPDCCH period of monitoring."""
        return self.timers.drx_long_cycle_base_s + self.npdcch_period_ms / 1000.0

    @property
    def connected_inactivity_s(self) -> float:
        """Connected-state inactivity timer: 0 for UP/SR, N NPDCCH periods for CP."""
        if self.procedure is Procedure.CP:
            return self.timers.cp_inactivity_npdcch_periods * self.npdcch_period_ms / 1000.0
        return 0.0

    @property
    def idle_active_timer_s(self) -> float:
        """Idle-state active timer (DRX window before PSM).

        CP exchanges that end with uplink data carry release assistance, so the
        connection is released with no idle DRX; everywhere else the timer is
        base + 2 long cycles.
        """
        if self.procedure is Procedure.CP and self.traffic_case.has_uplink_data:
            return 0.0
        return self.timers.idle_active_timer_base_s + 2.0 * self.idle_drx_cycle_s

    @property
    def sync_time_ms(self) -> float:
        return self.sync_base_ms * self.coverage.sync_time_scale

    def violations(self) -> list[str]:
        out = []
        if self.iat_s <= 0:
            out.append(f"iat_s={self.iat_s}: must be > 0")
        if self.battery_wh <= 0:
            out.append(f"battery_wh={self.battery_wh}: must be > 0")
        if self.sync_base_ms < 0:
            out.append(f"sync_base_ms={self.sync_base_ms}: must be >= 0")
        if self.ra_attempt_cap < 1:
            out.append(f"ra_attempt_cap={self.ra_attempt_cap}: must be >= 1")
        if self.rar_bytes <= 0:
            out.append(f"rar_bytes={self.rar_bytes}: must be > 0")
        for name in ("budget_npdcch_sf_per_s", "budget_npdsch_sf_per_s",
                     "budget_npusch_sc_ms_per_s", "budget_nprach_slots_per_s"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                out.append(f"{name}={v}: must be > 0")
        out.extend(self.coverage.violations())
        out.extend(self.power.violations())
        out.extend(self.traffic.violations())
        out.extend(self.timers.violations(self.coverage))
        return out


def validate_scenario(s: Scenario) -> Scenario:
    """Return the scenario unchanged if all invariants hold, else raise.

    Every violated invariant is reported with the offending field and bound.
    """
    problems = s.violations()
    if problems:
        raise ConfigurationError("invalid scenario: " + "; ".join(problems))
    return s


# --- scenario file format -------------------------------------------------
#
# Plain key=value tokens separated by whitespace or newlines, '#' comments.
# A minimal file: procedure=CP case=UL coverage=Normal iat=3600

_SCENARIO_KEYS: dict[str, tuple] = {
    # key: (target, field, parser)
    "procedure":        ("scenario", "procedure", Procedure),
    "case":             ("scenario", "traffic_case", TrafficCase),
    "iat":              ("scenario", "iat_s", float),
    "battery_wh":       ("scenario", "battery_wh", float),
    "reachability":     ("scenario", "mt_reachability", Reachability),
    "sync_base_ms":     ("scenario", "sync_base_ms", float),
    "ra_cap":           ("scenario", "ra_attempt_cap", int),
    "rar_bytes":        ("scenario", "rar_bytes", int),
    "budget_npdcch":    ("scenario", "budget_npdcch_sf_per_s", float),
    "budget_npdsch":    ("scenario", "budget_npdsch_sf_per_s", float),
    "budget_npusch":    ("scenario", "budget_npusch_sc_ms_per_s", float),
    "budget_nprach":    ("scenario", "budget_nprach_slots_per_s", float),
    "payload_bytes":    ("traffic", "data_payload_bytes", int),
    "overhead_bytes":   ("traffic", "protocol_overhead_bytes", int),
    "ack_payload_bytes": ("traffic", "ack_payload_bytes", int),
    "deep_sleep_mw":    ("power", "deep_sleep_mw", float),
    "inactive_mw":      ("power", "inactive_mw", float),
    "rx_mw":            ("power", "rx_mw", float),
    "tx_max_mw":        ("power", "tx_max_mw", float),
    "p_cmax_dbm":       ("power", "p_cmax_dbm", float),
    "p_o_npusch_dbm":   ("power", "p_o_npusch_dbm", float),
    "alpha":            ("power", "alpha", float),
    "initial_target_dbm": ("power", "initial_received_target_power_dbm", float),
    "delta_preamble_db": ("power", "delta_preamble_db", float),
    "ramp_step_db":     ("power", "power_ramping_step_db", float),
    "cp_inactivity_periods": ("timers", "cp_inactivity_npdcch_periods", int),
    "idle_timer_base_s": ("timers", "idle_active_timer_base_s", float),
    "drx_cycle_base_s": ("timers", "drx_long_cycle_base_s", float),
    "tau_period_s":     ("timers", "psm_tau_period_s", float),
}


def parse_scenario(text: str) -> Scenario:
    """Parse the key=value scenario format into a validated Scenario."""
    scenario_kw: dict = {}
    traffic_kw: dict = {}
    power_kw: dict = {}
    timer_kw: dict = {}
    buckets = {"scenario": scenario_kw, "traffic": traffic_kw,
               "power": power_kw, "timers": timer_kw}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for token in line.split():
            if "=" not in token:
                raise ConfigurationError(
                    f"line {lineno}: expected key=value, got {token!r}")
            key, _, raw = token.partition("=")
            if key == "coverage":
                scenario_kw["coverage"] = builtin_coverage_profile(raw)
                continue
            if key not in _SCENARIO_KEYS:
                raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
            target, fname, parser = _SCENARIO_KEYS[key]
            try:
                buckets[target][fname] = parser(raw)
            except ValueError:
                raise ConfigurationError(
                    f"line {lineno}: bad value {raw!r} for {key!r}") from None
    if traffic_kw:
        scenario_kw["traffic"] = TrafficModel(**traffic_kw)
    if power_kw:
        scenario_kw["power"] = PowerProfile(**power_kw)
    if timer_kw:
        scenario_kw["timers"] = TimerConfig(**timer_kw)
    return validate_scenario(Scenario(**scenario_kw))


def parse_scenario_file(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def format_scenario(s: Scenario) -> str:
    """Serialize a scenario to the key=value format (round-trips exactly)."""
    lines = []
    lines.append(f"procedure={s.procedure.value}")
    lines.append(f"case={s.traffic_case.value}")
    lines.append(f"coverage={s.coverage.name}")
    for key, (target, fname, parser) in _SCENARIO_KEYS.items():
        if key in ("procedure", "case"):
            continue
        obj = {"scenario": s, "traffic": s.traffic,
               "power": s.power, "timers": s.timers}[target]
        value = getattr(obj, fname)
        if value is None:
            continue
        if isinstance(value, enum.Enum):
            value = value.value
        lines.append(f"{key}={value!r}" if isinstance(value, float) else f"{key}={value}")
    return "\n".join(lines) + "\n"
