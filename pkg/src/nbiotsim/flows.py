"""Signaling flows and UE state timelines.

Builds the ordered message sequence for each (procedure, traffic case)
combination from the message catalog, resolves the DRX timers, and lays the
whole cycle out as a contiguous list of power-state intervals: sync, random
access, per-message control/gap/airtime, connected DRX, idle DRX, deep sleep.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from functools import lru_cache

from . import phy, ra
from .config import (ConfigurationError, PowerProfile, Procedure, Reachability,
                     Scenario, TrafficCase, UeState)

US_PER_MS = 1000
US_PER_S = 1_000_000


class Plane(str, enum.Enum):
    AS = "AS"       # access stratum signaling
    NAS = "NAS"     # non-access stratum signaling
    DATA = "DATA"   # application payload (possibly NAS-encapsulated)


class LinkDir(str, enum.Enum):
    UL = "UL"
    DL = "DL"


class EnergyCategory(str, enum.Enum):
    RA_SYNC = "ra_sync"       # cell search plus random access
    MESSAGES = "post_ra"      # everything between RA completion and release
    CONNECTED_DRX = "connected_drx"
    IDLE_DRX = "idle_drx"
    PSM = "psm"


@dataclass(frozen=True)
class SignalingMessage:
    name: str
    direction: LinkDir
    plane: Plane
    channel: phy.ChannelKind
    size_bytes: int


@dataclass(frozen=True)
class ProcedureFlow:
    flow_id: str
    procedure: Procedure
    traffic_case: TrafficCase
    messages: tuple[SignalingMessage, ...]
    connected_drx_s: float
    idle_drx_s: float
    rai: bool
    includes_tau: bool


@dataclass(frozen=True)
class Interval:
    """One homogeneous stretch of the cycle timeline (microsecond grid)."""

    start_us: int
    duration_us: int
    state: UeState
    power_mw: float
    category: EnergyCategory
    label: str

    @property
    def end_us(self) -> int:
        return self.start_us + self.duration_us


# --- catalog ----------------------------------------------------------------

_DATA_SIZE_RULES = {
    # name: which traffic-model size the catalog extra is added to
    "ul_data": "data",
    "ul_data_nas": "data",
    "rrc_setup_complete_nas_data": "data",
    "dl_data": "data",
    "dl_data_nas": "data",
    "dl_ack": "ack",
    "dl_ack_nas": "ack",
}


@dataclass(frozen=True)
class MessageCatalog:
    flows: dict[str, tuple[SignalingMessage, ...]]
    rar_bytes: int

    def flow_messages(self, flow_id: str) -> tuple[SignalingMessage, ...]:
        try:
            return self.flows[flow_id]
        except KeyError:
            raise ConfigurationError(f"message catalog has no flow {flow_id!r}") from None


def _parse_catalog(text: str) -> MessageCatalog:
    entries: dict[str, list[tuple[int, SignalingMessage]]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        cells = line.split()
        if len(cells) != 7:
            raise ConfigurationError(f"catalog line {lineno}: expected 7 columns")
        flow_id, seq, name, direction, plane, channel, size = cells
        msg = SignalingMessage(
            name=name,
            direction=LinkDir(direction),
            plane=Plane(plane),
            channel=phy.ChannelKind(channel),
            size_bytes=int(size),
        )
        if msg.direction is LinkDir.UL and msg.channel is not phy.ChannelKind.NPUSCH:
            raise ConfigurationError(f"catalog line {lineno}: UL messages use NPUSCH")
        if msg.direction is LinkDir.DL and msg.channel is not phy.ChannelKind.NPDSCH:
            raise ConfigurationError(f"catalog line {lineno}: DL messages use NPDSCH")
        entries.setdefault(flow_id, []).append((int(seq), msg))
    flows = {}
    rar_bytes = 7
    for flow_id, seq_msgs in entries.items():
        seq_msgs.sort(key=lambda pair: pair[0])
        msgs = tuple(m for _, m in seq_msgs)
        if flow_id == "common":
            rar = next((m for m in msgs if m.name == "random_access_response"), None)
            if rar is not None:
                rar_bytes = rar.size_bytes
            continue
        flows[flow_id] = msgs
    return MessageCatalog(flows=flows, rar_bytes=rar_bytes)


@lru_cache(maxsize=None)
def _default_catalog() -> MessageCatalog:
    return _parse_catalog(phy.verified_data_text("message_catalog.tsv"))


def load_message_catalog(path=None) -> MessageCatalog:
    """Load the default (checksummed) catalog, or a user-supplied file."""
    if path is None:
        return _default_catalog()
    with open(path, "r", encoding="utf-8") as fh:
        return _parse_catalog(fh.read())


# --- flow building ----------------------------------------------------------

def _flow_id(s: Scenario) -> str:
    base = f"{s.procedure.value}_{s.traffic_case.value}".lower()
    if s.traffic_case.mobile_terminated and s.mt_reachability is Reachability.DRX_PAGING:
        return base + "_pg"
    return base


def _materialize(msg: SignalingMessage, s: Scenario) -> SignalingMessage:
    if msg.plane is not Plane.DATA:
        return msg
    rule = _DATA_SIZE_RULES.get(msg.name)
    if rule is None:
        raise ConfigurationError(f"DATA message {msg.name!r} has no size rule")
    base = s.traffic.data_message_bytes if rule == "data" else s.traffic.ack_message_bytes
    return replace(msg, size_bytes=base + msg.size_bytes)


def _build(flow_id: str, s: Scenario, catalog: MessageCatalog | None) -> ProcedureFlow:
    catalog = catalog or _default_catalog()
    messages = tuple(_materialize(m, s) for m in catalog.flow_messages(flow_id))
    # Release assistance rides only in uplink NAS data PDUs, so only CP flows
    # that carry uplink data can signal it.
    rai = s.procedure is Procedure.CP and any(
        m.plane is Plane.DATA and m.direction is LinkDir.UL for m in messages)
    includes_tau = any(m.name.startswith(("tau_", "rrc_setup_complete_tau"))
                       for m in messages)
    # idle active timer: zero only for CP exchanges ending in uplink data (RAI)
    if rai:
        idle_s = 0.0
    else:
        idle_s = s.timers.idle_active_timer_base_s + 2.0 * s.idle_drx_cycle_s
    return ProcedureFlow(
        flow_id=flow_id,
        procedure=s.procedure,
        traffic_case=s.traffic_case,
        messages=messages,
        connected_drx_s=s.connected_inactivity_s,
        idle_drx_s=idle_s,
        rai=rai,
        includes_tau=includes_tau,
    )


def build_flow(s: Scenario, catalog: MessageCatalog | None = None) -> ProcedureFlow:
    """Catalog-driven message sequence for the scenario's procedure and case."""
    return _build(_flow_id(s), s, catalog)


def build_tau_flow(s: Scenario, catalog: MessageCatalog | None = None) -> ProcedureFlow:
    """Standalone periodic tracking-area-update flow for the scenario's procedure."""
    return _build(f"{s.procedure.value.lower()}_tau", s, catalog)


def connected_inactivity_s(s: Scenario) -> float:
    """Connected-state DRX before release: 0 for UP/SR, N NPDCCH periods for CP."""
    return s.connected_inactivity_s


def idle_active_timer_s(s: Scenario) -> float:
    """Idle-state DRX window before PSM; zero for CP exchanges ending in UL data."""
    return s.idle_active_timer_s


# --- timeline assembly -------------------------------------------------------

class _TimelineBuilder:
    def __init__(self) -> None:
        self.intervals: list[Interval] = []
        self.t_us = 0

    def emit(self, duration_us: int, state: UeState, power_mw: float,
             category: EnergyCategory, label: str) -> None:
        if duration_us <= 0:
            return
        self.intervals.append(Interval(self.t_us, duration_us, state,
                                       power_mw, category, label))
        self.t_us += duration_us

    def emit_ms(self, duration_ms: float, state: UeState, power_mw: float,
                category: EnergyCategory, label: str) -> None:
        self.emit(int(round(duration_ms * US_PER_MS)), state, power_mw, category, label)


def _emit_drx_cycles(tb: _TimelineBuilder, window_us: int, on_us: int, off_us: int,
                     p: PowerProfile, category: EnergyCategory) -> None:
    """Emit on/off DRX cycles until the window is exhausted (last one truncated)."""
    remaining = window_us
    while remaining > 0:
        on = min(on_us, remaining)
        tb.emit(on, UeState.RX, p.rx_mw, category, "drx_on")
        remaining -= on
        off = min(off_us, remaining)
        tb.emit(off, UeState.INACTIVE, p.inactive_mw, category, "drx_off")
        remaining -= off


def flow_timeline(flow: ProcedureFlow, s: Scenario,
                  fill_psm_to_iat: bool = True) -> list[Interval]:
    """Lay one traffic cycle out as contiguous power-state intervals.

    The random access phase uses expectation values (durations scaled by the
    expected attempt count).  Each shared-channel message is preceded by a
    wait for the next NPDCCH occasion, the control assignment itself, and the
    standard scheduling gap; transmit and receive never overlap.  Connected
    DRX (when configured) runs before the final release message, idle DRX
    until the active timer expires, then deep sleep up to the inter-arrival
    time.
    """
    c, p = s.coverage, s.power
    tb = _TimelineBuilder()
    period_us = c.npdcch_period_ms * US_PER_MS

    # cell search after deep sleep
    tb.emit_ms(s.sync_time_ms, UeState.RX, p.rx_mw, EnergyCategory.RA_SYNC, "sync")

    # random access, expectation-scaled
    attempts = ra.expected_attempts(s.ra_attempt_cap)
    for label, state, dur_ms, power_mw in ra.attempt_components(c, p, s.rar_bytes):
        tb.emit_ms(attempts * dur_ms, state, power_mw, EnergyCategory.RA_SYNC, label)

    npusch_dbm = phy.npusch_tx_power_dbm(c, p, c.target_mcl_db)
    npusch_mw = phy.tx_power_consumption_mw(p, npusch_dbm)
    conn_drx_us = int(round(flow.connected_drx_s * US_PER_S))

    for index, msg in enumerate(flow.messages):
        last = index == len(flow.messages) - 1
        if last and conn_drx_us > 0:
            # inactivity timer runs after the data exchange, before release
            on_us = c.rep_npdcch * US_PER_MS
            n_periods = conn_drx_us // period_us
            for _ in range(int(n_periods)):
                tb.emit(on_us, UeState.RX, p.rx_mw,
                        EnergyCategory.CONNECTED_DRX, "connected_drx_on")
                tb.emit(period_us - on_us, UeState.INACTIVE, p.inactive_mw,
                        EnergyCategory.CONNECTED_DRX, "connected_drx_off")
            tb.emit(conn_drx_us - int(n_periods) * period_us, UeState.INACTIVE,
                    p.inactive_mw, EnergyCategory.CONNECTED_DRX, "connected_drx_off")
        # wait for the next NPDCCH occasion
        align_us = (-tb.t_us) % period_us
        tb.emit(align_us, UeState.INACTIVE, p.inactive_mw,
                EnergyCategory.MESSAGES, "npdcch_align")
        cch = phy.message_airtime(1, c, phy.ChannelKind.NPDCCH)
        tb.emit_ms(cch.duration_ms, UeState.RX, p.rx_mw,
                   EnergyCategory.MESSAGES, f"npdcch:{msg.name}")
        tb.emit_ms(phy.schedule_gap_ms(msg.channel), UeState.INACTIVE, p.inactive_mw,
                   EnergyCategory.MESSAGES, "schedule_gap")
        airtime = phy.message_airtime(msg.size_bytes, c, msg.channel)
        if msg.direction is LinkDir.UL:
            tb.emit_ms(airtime.duration_ms, UeState.TX, npusch_mw,
                       EnergyCategory.MESSAGES, msg.name)
        else:
            tb.emit_ms(airtime.duration_ms, UeState.RX, p.rx_mw,
                       EnergyCategory.MESSAGES, msg.name)

    # idle DRX: the active timer keeps the UE reachable before PSM
    idle_us = int(round(flow.idle_drx_s * US_PER_S))
    _emit_drx_cycles(tb, idle_us, on_us=period_us,
                     off_us=int(round(s.timers.drx_long_cycle_base_s * US_PER_S)),
                     p=p, category=EnergyCategory.IDLE_DRX)

    if fill_psm_to_iat:
        iat_us = int(round(s.iat_s * US_PER_S))
        tb.emit(max(0, iat_us - tb.t_us), UeState.DEEP_SLEEP, p.deep_sleep_mw,
                EnergyCategory.PSM, "psm")
    return tb.intervals


def timeline_duration_s(timeline: list[Interval]) -> float:
    if not timeline:
        return 0.0
    return timeline[-1].end_us / US_PER_S


def active_duration_s(timeline: list[Interval]) -> float:
    """Cycle time spent outside deep sleep."""
    return sum(iv.duration_us for iv in timeline
               if iv.category is not EnergyCategory.PSM) / US_PER_S
