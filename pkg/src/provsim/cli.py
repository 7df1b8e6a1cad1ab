"""Batch command-line interface: run scenarios, sweep parameters, validate agreements.

Exit codes: 0 success, 2 validation/parse problems (bad scenario, bad trace,
bad agreement, missing file), 3 infeasible scenario, 1 anything else.
The PROVSIM_OUTPUT_DIR environment variable overrides where reports land.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .agreement import agreement_to_json, parse_agreement
from .errors import (
    AgreementError,
    EmptyTraceError,
    InfeasibleScenarioError,
    ProvsimError,
    ScenarioError,
    SweepError,
    TraceParseError,
)
from .metrics import csv_header, report_to_csv_row, report_to_json
from .scenario import (
    SWEEP_AXES,
    Scenario,
    apply_axis,
    load_scenario,
    run_scenario_obj,
    scenario_from_dict,
)
from .simkernel import write_event_log

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3

OUTPUT_DIR_ENV = "PROVSIM_OUTPUT_DIR"


def _output_dir(override: Optional[str], scenario: Optional[Scenario] = None) -> Path:
    """Precedence: --output-dir flag, then the env var, then the scenario, then cwd."""
    if override:
        return Path(override)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env)
    if scenario is not None and scenario.output_dir:
        return scenario.base_dir / scenario.output_dir
    return Path(".")


def _classify(exc: ProvsimError) -> tuple[str, int]:
    if isinstance(exc, InfeasibleScenarioError):
        return "infeasible scenario", EXIT_INFEASIBLE
    if isinstance(exc, (TraceParseError, EmptyTraceError)):
        return "trace error", EXIT_INVALID
    if isinstance(exc, (ScenarioError, AgreementError)):
        return "invalid input", EXIT_INVALID
    if isinstance(exc, SweepError):
        return "sweep error", EXIT_INVALID
    return "error", EXIT_ERROR


def _write_reports(
    scenario: Scenario, result, out_dir: Path, event_log: bool
) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    ident = scenario.identification()
    written = []
    json_path = out_dir / f"{scenario.name}.report.json"
    json_path.write_text(report_to_json(result.metrics, ident))
    written.append(json_path)
    csv_path = out_dir / f"{scenario.name}.report.csv"
    csv_path.write_text(csv_header() + "\n" + report_to_csv_row(result.metrics, ident) + "\n")
    written.append(csv_path)
    if event_log:
        log_path = out_dir / f"{scenario.name}.events.jsonl"
        with log_path.open("w") as stream:
            write_event_log(result.events, stream)
        written.append(log_path)
    return written


def _scenario_from_flags(args: argparse.Namespace) -> Scenario:
    doc = {
        "name": args.name or "adhoc",
        "pbj_trace": args.pbj_trace,
        "ws_trace": args.ws_trace,
        "window": {"start_offset": args.window_start, "duration": args.duration},
        "cpus_per_node": args.cpus_per_node,
        "regime": args.regime,
    }
    if args.target_peaks:
        try:
            pbj, ws = (int(v) for v in args.target_peaks.split(":"))
        except ValueError:
            raise ScenarioError(
                f"--target-peaks looks like '128:128', got {args.target_peaks!r}"
            ) from None
        doc["target_peaks"] = {"pbj": pbj, "ws": ws}
    if args.config_size is not None:
        doc["config_size"] = args.config_size
    if args.params:
        doc["params"] = args.params
    return scenario_from_dict(doc)


def _cmd_run(args: argparse.Namespace) -> int:
    if args.scenario is not None:
        if args.pbj_trace or args.ws_trace:
            raise ScenarioError("give either a scenario file or --pbj-trace/--ws-trace flags")
        scenario = load_scenario(args.scenario)
    else:
        if not (args.pbj_trace and args.ws_trace and args.regime) or args.duration is None:
            raise ScenarioError(
                "ad hoc runs need --pbj-trace, --ws-trace, --regime and --duration"
            )
        scenario = _scenario_from_flags(args)
    result = run_scenario_obj(scenario)
    out_dir = _output_dir(args.output_dir, scenario)
    written = _write_reports(scenario, result, out_dir, args.event_log)
    report = result.metrics
    exec_s = "-" if report.avg_execution_time is None else f"{report.avg_execution_time:.1f}"
    turn_s = "-" if report.avg_turnaround_time is None else f"{report.avg_turnaround_time:.1f}"
    print(
        f"{scenario.name}: regime={scenario.regime} completed={report.completed_jobs} "
        f"exec={exec_s}s turnaround={turn_s}s peak={report.peak_consumption} "
        f"total={report.total_consumption_node_hours} node-h "
        f"adjustments={report.adjustment_count}"
    )
    for path in written:
        print(f"  wrote {path}")
    return EXIT_OK


def _run_sweep_point(point: Scenario) -> tuple[str, str]:
    result = run_scenario_obj(point)
    return point.name, report_to_csv_row(result.metrics, point.identification())


def _cmd_sweep(args: argparse.Namespace) -> int:
    base = load_scenario(args.scenario)
    values = [v for v in (s.strip() for s in args.values.split(",")) if v]
    if not values:
        raise ScenarioError("sweep needs at least one value")
    points = [apply_axis(base, args.axis, value) for value in values]
    rows: dict[str, str] = {}
    if args.workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.workers) as pool:
            futures = {pool.submit(_run_sweep_point, p): p for p in points}
            for future in concurrent.futures.as_completed(futures):
                point = futures[future]
                try:
                    name, row = future.result()
                except ProvsimError as exc:
                    raise SweepError(f"sweep point {point.name} failed: {exc}") from None
                rows[name] = row
    else:
        for point in points:
            try:
                rows[point.name] = _run_sweep_point(point)[1]
            except ProvsimError as exc:
                raise SweepError(f"sweep point {point.name} failed: {exc}") from None
    out_dir = _output_dir(args.output_dir, base)
    out_dir.mkdir(parents=True, exist_ok=True)
    merged = out_dir / f"{base.name}.sweep_{args.axis}.csv"
    lines = [csv_header()]
    lines.extend(rows[point.name] for point in points)  # merged in given-value order
    merged.write_text("\n".join(lines) + "\n")
    print(f"{base.name}: swept {args.axis} over {len(points)} points")
    print(f"  wrote {merged}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    path = Path(args.agreement)
    try:
        text = path.read_text()
    except OSError as exc:
        raise AgreementError(f"cannot read agreement file {path}: {exc}") from None
    agreement = parse_agreement(text)
    print(agreement_to_json(agreement))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="provsim",
        description="Trace-driven simulator for coordinated cluster resource provisioning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario file (or ad hoc flags) and write reports")
    run_p.add_argument("scenario", nargs="?", default=None, help="path to a scenario JSON file")
    run_p.add_argument("--event-log", action="store_true", help="also write the LDJSON event log")
    run_p.add_argument("--output-dir", default=None, help=f"report directory (or ${OUTPUT_DIR_ENV})")
    adhoc = run_p.add_argument_group("ad hoc run (instead of a scenario file)")
    adhoc.add_argument("--pbj-trace", default=None, help="SWF batch-job trace path")
    adhoc.add_argument("--ws-trace", default=None, help="demand-trace CSV path")
    adhoc.add_argument("--regime", choices=["DCS", "FB", "FLB_NUB", "EC2RS"], default=None)
    adhoc.add_argument("--duration", type=int, default=None, help="window duration in seconds")
    adhoc.add_argument("--window-start", type=int, default=0)
    adhoc.add_argument("--cpus-per-node", type=int, default=1)
    adhoc.add_argument("--target-peaks", default=None, help="scaling tuple as pbj:ws, e.g. 128:128")
    adhoc.add_argument("--config-size", type=int, default=None)
    adhoc.add_argument("--params", default=None, help='e.g. "B25/U1.2/V0.2/G0.5/L60"')
    adhoc.add_argument("--name", default=None, help="report base name for ad hoc runs")
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="run one scenario across an axis of parameter values")
    sweep_p.add_argument("scenario", help="path to the base scenario JSON file")
    sweep_p.add_argument("--axis", required=True, choices=SWEEP_AXES)
    sweep_p.add_argument(
        "--values", required=True,
        help="comma-separated values (L in minutes; tuple as pbj:ws pairs)",
    )
    sweep_p.add_argument("--workers", type=int, default=1, help="concurrent sweep workers")
    sweep_p.add_argument("--output-dir", default=None, help=f"report directory (or ${OUTPUT_DIR_ENV})")
    sweep_p.set_defaults(func=_cmd_sweep)

    val_p = sub.add_parser("validate", help="parse and validate an RE agreement (XML or JSON)")
    val_p.add_argument("agreement", help="path to an agreement file")
    val_p.set_defaults(func=_cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProvsimError as exc:
        category, code = _classify(exc)
        print(f"provsim: {category}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
