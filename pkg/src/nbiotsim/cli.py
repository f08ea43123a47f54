"""Batch command-line front end.

Two subcommands mirror the two evaluation products: `lifetime` sweeps battery
lifetime with per-category energy shares, `capacity` prints the capacity-gain
grid of both optimized procedures against the legacy baseline.  Output is
deterministic: fixed column order, fixed 6-decimal precision, no timestamps.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, replace

from . import capacity as cap
from . import energy
from .config import (ConfigurationError, Procedure, Scenario, TrafficCase,
                     builtin_coverage_profile, parse_scenario_file,
                     validate_scenario, COVERAGE_NAMES)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2

DEFAULT_IAT_HOURS = tuple(range(1, 25))


@dataclass(frozen=True)
class SweepSpec:
    """One swept axis over a fixed base scenario."""

    axis: str                    # iat | coverage | procedure | case
    values: tuple
    fixed: Scenario

    def __post_init__(self):
        if not self.values:
            raise ConfigurationError("sweep needs at least one value")
        if self.axis == "iat":
            numeric = tuple(float(v) for v in self.values)
            if any(b <= a for a, b in zip(numeric, numeric[1:])):
                raise ConfigurationError("iat sweep values must be strictly increasing")

    def scenarios(self):
        for value in self.values:
            if self.axis == "iat":
                yield replace(self.fixed, iat_s=float(value))
            elif self.axis == "coverage":
                yield replace(self.fixed, coverage=builtin_coverage_profile(value))
            elif self.axis == "procedure":
                yield replace(self.fixed, procedure=Procedure(value))
            elif self.axis == "case":
                yield replace(self.fixed, traffic_case=TrafficCase(value))
            else:
                raise ConfigurationError(f"unknown sweep axis {self.axis!r}")


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: list[tuple]


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


LIFETIME_COLUMNS = ("procedure", "case", "coverage", "iat_s", "lifetime_years",
                    "share_ra_sync", "share_messages", "share_drx", "share_psm",
                    "error")


def _baseline_row(base: Scenario) -> tuple:
    return ("PSM_BASELINE", "-", "-", 0.0,
            energy.psm_baseline_lifetime_years(base), 0.0, 0.0, 0.0, 1.0, "")


def run_lifetime_sweep(spec: SweepSpec) -> Table:
    """One row per sweep point plus the deep-sleep-only baseline row."""
    rows = [_baseline_row(spec.fixed)]
    for s in spec.scenarios():
        ident = (s.procedure.value, s.traffic_case.value, s.coverage.name, s.iat_s)
        try:
            validate_scenario(s)
            breakdown = energy.cycle_energy(s)
            years = energy.battery_lifetime_years(s)
        except ConfigurationError as exc:
            rows.append(ident + (0.0, 0.0, 0.0, 0.0, 0.0, str(exc)))
            continue
        rows.append(ident + (years,
                             breakdown.share("ra_sync"),
                             breakdown.share("post_ra_messages"),
                             breakdown.share("drx"),
                             breakdown.share("psm"),
                             ""))
    return Table(LIFETIME_COLUMNS, rows)


CAPACITY_COLUMNS = ("procedure", "case", "coverage", "reports_per_hour",
                    "bottleneck", "gain_vs_sr_pct")

CAPACITY_IAT_S = 3600.0   # capacity figures assume one report per hour


def run_capacity_report(s: Scenario) -> Table:
    """Gain grid of CP and UP against SR: 2 procedures x 4 cases x 3 coverages."""
    rows = []
    for proc in (Procedure.CP, Procedure.UP):
        for case in TrafficCase:
            for cov_name in COVERAGE_NAMES:
                point = replace(s, procedure=proc, traffic_case=case,
                                coverage=builtin_coverage_profile(cov_name),
                                iat_s=CAPACITY_IAT_S)
                report = cap.cell_capacity(point)
                sr_report = cap.cell_capacity(replace(point, procedure=Procedure.SR))
                report = replace(report,
                                 gain_vs_sr_pct=cap.capacity_gain_pct(report, sr_report))
                rows.append((proc.value, case.value, cov_name,
                             report.reports_per_hour, report.bottleneck.value,
                             report.gain_vs_sr_pct))
    return Table(CAPACITY_COLUMNS, rows)


def emit(table: Table, fmt: str, stream) -> None:
    """Write a table as csv or plot-data (gnuplot-style columns)."""
    if fmt == "csv":
        stream.write(",".join(table.columns) + "\n")
        for row in table.rows:
            stream.write(",".join(_fmt(v) for v in row) + "\n")
    elif fmt == "plot-data":
        stream.write("# " + " ".join(table.columns) + "\n")
        for row in table.rows:
            stream.write(" ".join(_fmt(v) if v != "" else "-" for v in row) + "\n")
    else:
        raise ConfigurationError(f"unknown output format {fmt!r}")


def _base_scenario(args) -> Scenario:
    if args.scenario:
        s = parse_scenario_file(args.scenario)
    else:
        s = Scenario()
    if args.procedure:
        s = replace(s, procedure=Procedure(args.procedure))
    if args.case:
        s = replace(s, traffic_case=TrafficCase(args.case))
    if args.coverage:
        s = replace(s, coverage=builtin_coverage_profile(args.coverage))
    if args.iat is not None:
        s = replace(s, iat_s=args.iat)
    return s


def _parse_sweep(text: str) -> tuple[str, tuple]:
    axis, _, values = text.partition("=")
    if not values:
        raise ConfigurationError("expected --sweep axis=v1,v2,...")
    parts = tuple(v for v in values.split(",") if v)
    if axis == "iat":
        parsed = tuple(float(v) for v in parts)
        if any(b <= a for a, b in zip(parsed, parsed[1:])):
            raise ConfigurationError("iat sweep values must be strictly increasing")
        return axis, parsed
    return axis, parts


def _lifetime_tables(args) -> list[tuple[str, Table]]:
    base = _base_scenario(args)
    if args.sweep:
        axis, values = _parse_sweep(args.sweep)
        spec = SweepSpec(axis=axis, values=values, fixed=base)
        return [("lifetime", run_lifetime_sweep(spec))]
    if args.iat is not None:
        # a pinned inter-arrival time means a single evaluation point
        spec = SweepSpec("iat", (base.iat_s,), fixed=base)
        return [("lifetime", run_lifetime_sweep(spec))]
    # default: the full lifetime picture, one sweep per procedure and coverage
    iat_values = tuple(h * 3600.0 for h in DEFAULT_IAT_HOURS)
    rows: list[tuple] = [_baseline_row(base)]
    for proc in Procedure:
        for cov in COVERAGE_NAMES:
            fixed = replace(base, procedure=proc,
                            coverage=builtin_coverage_profile(cov))
            table = run_lifetime_sweep(SweepSpec("iat", iat_values, fixed))
            rows.extend(table.rows[1:])   # skip the duplicate baseline
    return [("lifetime", Table(LIFETIME_COLUMNS, rows))]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nbiotsim",
        description="Analytical NB-IoT small-data procedure evaluation")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--scenario", help="scenario file (key=value format)")
        p.add_argument("--procedure", choices=[x.value for x in Procedure])
        p.add_argument("--case", choices=[x.value for x in TrafficCase])
        p.add_argument("--coverage", choices=list(COVERAGE_NAMES))
        p.add_argument("--iat", type=float, help="inter-arrival time in seconds")
        p.add_argument("--out", help="output directory (default: stdout)")
        p.add_argument("--format", choices=["csv", "plot-data"], default="csv")

    p_life = sub.add_parser("lifetime", help="battery lifetime and energy shares")
    add_common(p_life)
    p_life.add_argument("--sweep", help="axis=v1,v2,... (iat values in seconds)")

    p_cap = sub.add_parser("capacity", help="capacity gain grid vs SR")
    add_common(p_cap)

    args = parser.parse_args(argv)

    try:
        if args.command == "lifetime":
            tables = _lifetime_tables(args)
        else:
            tables = [("capacity", run_capacity_report(_base_scenario(args)))]
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    status = EXIT_OK
    for _, table in tables:
        if "error" in table.columns:
            idx = table.columns.index("error")
            if any(row[idx] for row in table.rows):
                status = EXIT_VALIDATION

    ext = "csv" if args.format == "csv" else "dat"
    try:
        for name, table in tables:
            if args.out:
                os.makedirs(args.out, exist_ok=True)
                path = os.path.join(args.out, f"{name}.{ext}")
                with open(path, "w", encoding="utf-8", newline="") as fh:
                    emit(table, args.format, fh)
            else:
                emit(table, args.format, sys.stdout)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


if __name__ == "__main__":
    sys.exit(main())
