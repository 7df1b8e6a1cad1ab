"""Workload trace ingestion and shaping.

Two trace kinds drive a simulation: parallel batch job logs in the
Parallel Workloads Archive's Standard Workload Format (SWF), and
web-service node-demand traces as two-column CSV. All shaping helpers
(window, normalize_cpus, scale_to_peak) are pure and return new traces;
loaded traces are immutable and safe to share between sweep workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import EmptyTraceError, TraceParseError

# SWF field positions (0-based) of the fields the simulator consumes.
_F_ID = 0
_F_SUBMIT = 1
_F_RUNTIME = 3
_F_ALLOC = 4
_F_REQUESTED = 7
_SWF_MIN_FIELDS = 18


@dataclass(frozen=True)
class Job:
    """One parallel batch job: submit time and runtime in seconds, size in nodes."""

    id: int
    submit_time: int
    runtime: int
    size: int


@dataclass(frozen=True)
class JobTrace:
    """An ordered batch-job trace with its peak node demand and time window.

    ``window`` is ``(start_offset, duration)``: the offset of the segment
    within the original log and the segment length, both in seconds.
    """

    jobs: tuple[Job, ...]
    peak_demand: int
    window: tuple[int, int]


@dataclass(frozen=True)
class DemandTrace:
    """Piecewise-constant web-service node demand: each sample holds until the next."""

    samples: tuple[tuple[int, int], ...]
    peak_demand: int

    def demand_at(self, t: int) -> int:
        """Demand in effect at time t (0 before the first sample)."""
        current = 0
        for time, demand in self.samples:
            if time > t:
                break
            current = demand
        return current


def _as_lines(text: Union[str, Iterable[str]]) -> Iterable[str]:
    if isinstance(text, str):
        return text.splitlines()
    return (line.rstrip("\n") for line in text)


def _swf_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(float(token))
    except ValueError:
        raise TraceParseError(
            f"SWF line {lineno}: non-numeric {what} field: {token!r}"
        ) from None


def parse_swf(text: Union[str, Iterable[str]]) -> JobTrace:
    """Parse an SWF character stream into a JobTrace.

    Comment lines start with ';'. Data lines must carry at least 18
    whitespace-separated fields. Job size is the allocated-processor count,
    falling back to the requested count when allocation is missing (<= 0).
    Jobs with non-positive runtime or size are dropped. Submit times keep
    their original offsets; re-basing to zero is `window`'s job.
    """
    jobs: list[Job] = []
    seen_ids: set[int] = set()
    for lineno, raw in enumerate(_as_lines(text), start=1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        fields = line.split()
        if len(fields) < _SWF_MIN_FIELDS:
            raise TraceParseError(
                f"SWF line {lineno}: expected >= {_SWF_MIN_FIELDS} fields, got {len(fields)}"
            )
        job_id = _swf_int(fields[_F_ID], lineno, "job id")
        submit = _swf_int(fields[_F_SUBMIT], lineno, "submit time")
        runtime = _swf_int(fields[_F_RUNTIME], lineno, "run time")
        alloc = _swf_int(fields[_F_ALLOC], lineno, "allocated processors")
        requested = _swf_int(fields[_F_REQUESTED], lineno, "requested processors")
        size = alloc if alloc > 0 else requested
        if runtime <= 0 or size <= 0 or submit < 0:
            continue
        if job_id in seen_ids:
            raise TraceParseError(f"SWF line {lineno}: duplicate job id {job_id}")
        seen_ids.add(job_id)
        jobs.append(Job(id=job_id, submit_time=submit, runtime=runtime, size=size))
    if not jobs:
        raise EmptyTraceError("SWF trace contains no usable jobs after filtering")
    jobs.sort(key=lambda j: j.submit_time)
    return JobTrace(
        jobs=tuple(jobs),
        peak_demand=max(j.size for j in jobs),
        window=(0, max(j.submit_time for j in jobs)),
    )


def parse_demand_trace(text: Union[str, Iterable[str]]) -> DemandTrace:
    """Parse a "time,demand" CSV stream into a DemandTrace.

    A single optional header line "time,demand" is accepted. Sample times
    must be strictly increasing and demands nonnegative integers.
    """
    samples: list[tuple[int, int]] = []
    last_time: int | None = None
    for lineno, raw in enumerate(_as_lines(text), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise TraceParseError(f"demand line {lineno}: expected 'time,demand', got {line!r}")
        if last_time is None and not samples and not parts[0].lstrip("-").isdigit():
            if parts[0].lower() == "time" and parts[1].lower() == "demand":
                continue
            raise TraceParseError(f"demand line {lineno}: unrecognized header {line!r}")
        try:
            t, d = int(parts[0]), int(parts[1])
        except ValueError:
            raise TraceParseError(f"demand line {lineno}: non-integer field in {line!r}") from None
        if d < 0:
            raise TraceParseError(f"demand line {lineno}: negative demand {d}")
        if t < 0:
            raise TraceParseError(f"demand line {lineno}: negative time {t}")
        if last_time is not None and t <= last_time:
            raise TraceParseError(
                f"demand line {lineno}: time {t} not greater than previous {last_time}"
            )
        last_time = t
        samples.append((t, d))
    if not samples:
        raise EmptyTraceError("demand trace contains no samples")
    return DemandTrace(samples=tuple(samples), peak_demand=max(d for _, d in samples))


def serialize_demand_trace(trace: DemandTrace) -> str:
    """Canonical CSV form of a DemandTrace (header + one line per sample)."""
    lines = ["time,demand"]
    lines.extend(f"{t},{d}" for t, d in trace.samples)
    return "\n".join(lines) + "\n"


def window(trace: JobTrace, start_offset: int, duration: int) -> JobTrace:
    """Cut the segment [start_offset, start_offset + duration) and re-base to 0."""
    if duration <= 0:
        raise ValueError("window duration must be positive")
    end = start_offset + duration
    kept = [
        Job(id=j.id, submit_time=j.submit_time - start_offset, runtime=j.runtime, size=j.size)
        for j in trace.jobs
        if start_offset <= j.submit_time < end
    ]
    if not kept:
        raise EmptyTraceError(
            f"no jobs in window [{start_offset}, {end}) of trace with window {trace.window}"
        )
    return JobTrace(
        jobs=tuple(kept),
        peak_demand=max(j.size for j in kept),
        window=(trace.window[0] + start_offset, duration),
    )


def normalize_cpus(trace: JobTrace, cpus_per_node: int) -> JobTrace:
    """Convert per-CPU job sizes to node counts: size -> ceil(size / cpus_per_node).

    Ceiling keeps single-CPU jobs alive (size never becomes 0).
    """
    if cpus_per_node < 1:
        raise ValueError("cpus_per_node must be >= 1")
    jobs = tuple(
        Job(
            id=j.id,
            submit_time=j.submit_time,
            runtime=j.runtime,
            size=-(-j.size // cpus_per_node),
        )
        for j in trace.jobs
    )
    return JobTrace(jobs=jobs, peak_demand=max(j.size for j in jobs), window=trace.window)


def _scale_value(value: int, target_peak: int, peak: int, minimum: int) -> int:
    # value * target_peak is exact in int; round half up, clamp into range.
    scaled = math.floor(value * target_peak / peak + 0.5)
    return min(target_peak, max(minimum, scaled))


def scale_to_peak(trace, target_peak: int):
    """Rescale a JobTrace or DemandTrace so its peak demand is exactly target_peak.

    Every size/demand is multiplied by target_peak / current peak and rounded
    to the nearest integer; job sizes are floored at 1, demands at 0, and all
    values are clamped to target_peak so the resulting peak is exact.
    """
    if target_peak < 1:
        raise ValueError("target_peak must be >= 1")
    if isinstance(trace, JobTrace):
        if trace.peak_demand <= 0:
            raise ValueError("cannot scale a job trace with zero peak demand")
        jobs = tuple(
            Job(
                id=j.id,
                submit_time=j.submit_time,
                runtime=j.runtime,
                size=_scale_value(j.size, target_peak, trace.peak_demand, 1),
            )
            for j in trace.jobs
        )
        return JobTrace(jobs=jobs, peak_demand=target_peak, window=trace.window)
    if isinstance(trace, DemandTrace):
        if trace.peak_demand <= 0:
            raise ValueError("cannot scale a demand trace with zero peak demand")
        samples = tuple(
            (t, _scale_value(d, target_peak, trace.peak_demand, 0)) for t, d in trace.samples
        )
        return DemandTrace(samples=samples, peak_demand=target_peak)
    raise TypeError(f"scale_to_peak expects JobTrace or DemandTrace, got {type(trace)!r}")
