"""Analytical simulator of NB-IoT small-data transmission procedures.

Computes UE energy consumption, battery lifetime, per-channel radio-resource
usage, and cell capacity gain of the control-plane (CP) and user-plane (UP)
small-data optimizations relative to the legacy Service Request (SR), across
coverage levels and traffic cases.
"""

from .config import (ConfigurationError, CoverageProfile, Modulation, PowerProfile,
                     Procedure, Reachability, Scenario, TimerConfig, TrafficCase,
                     TrafficModel, UeState, builtin_coverage_profile,
                     format_scenario, parse_scenario, parse_scenario_file,
                     validate_scenario)
from .phy import (Airtime, ChannelKind, LinkDirection, message_airtime,
                  npdcch_period_ms, nprach_tx_power_dbm, npusch_tx_power_dbm,
                  schedule_gap_ms, tbs_bits, tx_power_consumption_mw)
from .ra import RaOutcome, detection_probability, expected_attempts, ra_cost
from .flows import (EnergyCategory, Interval, MessageCatalog, Plane,
                    ProcedureFlow, SignalingMessage, build_flow, build_tau_flow,
                    connected_inactivity_s, flow_timeline, idle_active_timer_s,
                    load_message_catalog)
from .energy import (EnergyBreakdown, average_power_w, battery_lifetime_years,
                     cycle_energy, psm_baseline_lifetime_years)
from .capacity import (CapacityReport, ChannelBudget, capacity_gain_pct,
                       cell_capacity, default_budgets, flow_channel_usage)

__version__ = "0.1.0"
