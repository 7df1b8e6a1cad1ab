"""Evaluation metrics accumulated from a kernel event log.

The consumption curve is regime-specific: bounded regimes (DCS, FB) consume
their whole configuration at all times; the coordinated-pool regime consumes
the pool plus both REs' external leases; the public-cloud baseline consumes
every active job lease plus the web-service demand curve. Totals are kept as
exact integer node-seconds and reported in node-hours to one decimal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Optional

from .state import (
    KIND_JOB_ARRIVAL,
    KIND_JOB_COMPLETION,
    REGIME_DCS,
    REGIME_EC2RS,
    REGIME_FB,
    REGIME_FLB_NUB,
)

CSV_COLUMNS = [
    "scenario",
    "regime",
    "config_size",
    "prc_pbj",
    "prc_ws",
    "B",
    "U",
    "V",
    "G",
    "L_seconds",
    "completed_jobs",
    "incomplete_jobs",
    "avg_execution_time_s",
    "avg_turnaround_time_s",
    "peak_consumption_nodes",
    "total_consumption_node_hours",
    "adjustment_count",
    "window_duration_s",
]


@dataclass
class MetricsReport:
    """The comparison metrics of one simulated scenario."""

    regime: str
    completed_jobs: int
    incomplete_jobs: int
    avg_execution_time: Optional[float]
    avg_turnaround_time: Optional[float]
    peak_consumption: int
    total_consumption_node_seconds: int
    adjustment_count: int
    window_duration: int

    @property
    def total_consumption_node_hours(self) -> float:
        return round(self.total_consumption_node_seconds / 3600.0, 1)


def consumption_curve(
    events: list[dict[str, Any]],
    regime: str,
    *,
    config_size: Optional[int],
    pool_size: int,
    duration: int,
) -> list[tuple[int, int]]:
    """Step function of nodes consumed over [0, duration], from the event log."""
    if regime in (REGIME_DCS, REGIME_FB):
        if config_size is None:
            raise ValueError(f"{regime} requires a configuration size")
        return [(0, config_size)]
    if regime == REGIME_FLB_NUB:
        initial = pool_size

        def level(snapshot: dict[str, int]) -> int:
            return pool_size + snapshot["pbj_external"] + snapshot["ws_external"]

    elif regime == REGIME_EC2RS:
        initial = 0

        def level(snapshot: dict[str, int]) -> int:
            return snapshot["pbj_owned"] + snapshot["ws_held"]

    else:
        raise ValueError(f"unknown regime {regime!r}")
    curve: list[tuple[int, int]] = [(0, initial)]
    for record in events:
        t = record["time"]
        if t > duration:
            break
        value = level(record["state"])
        if value != curve[-1][1]:
            if t == curve[-1][0]:
                curve[-1] = (t, value)
            else:
                curve.append((t, value))
    return curve


def integrate_curve(curve: list[tuple[int, int]], duration: int) -> int:
    """Exact node-seconds under a step curve over [0, duration]."""
    total = 0
    for (t0, v), (t1, _) in zip(curve, curve[1:]):
        if t0 >= duration:
            break
        total += v * (min(t1, duration) - t0)
    last_t, last_v = curve[-1]
    if last_t < duration:
        total += last_v * (duration - last_t)
    return total


def finalize(
    events: list[dict[str, Any]],
    curve: list[tuple[int, int]],
    *,
    duration: int,
    regime: str,
    total_jobs: Optional[int] = None,
    adjustment_count: Optional[int] = None,
) -> MetricsReport:
    """Close the measurement window and assemble the report.

    Averages cover completed jobs only (jobs still queued or running at the
    window end are reported as incomplete); turnaround runs from the original
    submission, and execution time is the trace runtime.
    """
    completions = [r for r in events if r["kind"] == KIND_JOB_COMPLETION and r["time"] <= duration]
    arrived = {r["payload"]["job_id"] for r in events if r["kind"] == KIND_JOB_ARRIVAL}
    n_jobs = total_jobs if total_jobs is not None else len(arrived)
    completed = len(completions)
    if adjustment_count is None:
        adjustment_count = sum(len(r.get("adjustments", ())) for r in events)
    avg_exec: Optional[float] = None
    avg_turnaround: Optional[float] = None
    if completed:
        avg_exec = sum(r["payload"]["runtime"] for r in completions) / completed
        avg_turnaround = sum(r["payload"]["turnaround"] for r in completions) / completed
    return MetricsReport(
        regime=regime,
        completed_jobs=completed,
        incomplete_jobs=n_jobs - completed,
        avg_execution_time=avg_exec,
        avg_turnaround_time=avg_turnaround,
        peak_consumption=max(v for _, v in curve),
        total_consumption_node_seconds=integrate_curve(curve, duration),
        adjustment_count=adjustment_count,
        window_duration=duration,
    )


def _round1(value: Optional[float]) -> Optional[float]:
    return None if value is None else round(value, 1)


def report_to_dict(report: MetricsReport, scenario: dict[str, Any]) -> dict[str, Any]:
    """JSON-ready report; `scenario` supplies the identification columns."""
    return {
        "scenario": scenario.get("name", ""),
        "regime": report.regime,
        "config_size": scenario.get("config_size"),
        "prc_pbj": scenario.get("prc_pbj"),
        "prc_ws": scenario.get("prc_ws"),
        "B": scenario.get("B"),
        "U": scenario.get("U"),
        "V": scenario.get("V"),
        "G": scenario.get("G"),
        "L_seconds": scenario.get("L_seconds"),
        "completed_jobs": report.completed_jobs,
        "incomplete_jobs": report.incomplete_jobs,
        "avg_execution_time_s": _round1(report.avg_execution_time),
        "avg_turnaround_time_s": _round1(report.avg_turnaround_time),
        "peak_consumption_nodes": report.peak_consumption,
        "total_consumption_node_hours": report.total_consumption_node_hours,
        "total_consumption_node_seconds": report.total_consumption_node_seconds,
        "adjustment_count": report.adjustment_count,
        "window_duration_s": report.window_duration,
    }


def report_to_json(report: MetricsReport, scenario: dict[str, Any]) -> str:
    return json.dumps(report_to_dict(report, scenario), indent=2) + "\n"


def csv_header() -> str:
    return ",".join(CSV_COLUMNS)


def report_to_csv_row(report: MetricsReport, scenario: dict[str, Any]) -> str:
    """One CSV row in the fixed, documented column order (empty = absent)."""
    data = report_to_dict(report, scenario)
    cells = []
    for column in CSV_COLUMNS:
        value = data.get(column)
        cells.append("" if value is None else str(value))
    return ",".join(cells)
