"""Independent reference implementations used to cross-check the simulator.

Everything here is deliberately written against the event-log payloads (not
the kernel's snapshots), or by brute force, so the checks do not share code
paths with the implementation under test.
"""

from __future__ import annotations

import random

from provsim.trace import DemandTrace, Job, JobTrace


def replay_consumption(events, regime, *, config_size=None, pool_size=0, duration=0,
                       pbj_floor=0):
    """Rebuild the nodes-consumed step curve from event payloads alone."""
    if regime in ("DCS", "FB"):
        return [(0, config_size)]
    points = [(0, pool_size if regime == "FLB_NUB" else 0)]

    def emit(t, v):
        if v != points[-1][1]:
            if t == points[-1][0]:
                points[-1] = (t, v)
            else:
                points.append((t, v))

    if regime == "EC2RS":
        leases = 0
        demand = 0
        for r in events:
            if r["time"] > duration:
                break
            if r["kind"] == "job_arrival":
                leases += r["payload"]["size"]
            elif r["kind"] == "lease_tick":
                leases -= r["payload"]["nodes"]
            elif r["kind"] == "ws_demand_change":
                demand = r["payload"]["demand"]
            emit(r["time"], leases + demand)
        return points

    # FLB_NUB: replay the first-come pool accounting from adjustment deltas,
    # starting from the rigid lower-bound share.
    pbj_owned = pbj_pool = pbj_floor
    ws_held = ws_pool = 0
    for r in events:
        if r["time"] > duration:
            break
        for actor, delta in r.get("adjustments", ()):
            if actor == "ws_manager":
                if delta > 0:
                    room = pool_size - pbj_pool - ws_pool
                    ws_pool += min(delta, room)
                else:
                    ext = ws_held - ws_pool
                    pool_part = max(0, -delta - ext)
                    ws_pool -= pool_part
                ws_held += delta
            else:  # pbj_manager or provision_service
                if delta > 0:
                    room = pool_size - pbj_pool - ws_pool
                    pbj_pool += min(delta, room)
                else:
                    ext = pbj_owned - pbj_pool
                    pool_part = max(0, -delta - ext)
                    pbj_pool -= pool_part
                pbj_owned += delta
        emit(r["time"], pool_size + (pbj_owned - pbj_pool) + (ws_held - ws_pool))
    return points


def integrate(points, duration):
    total = 0
    for (t0, v), (t1, _) in zip(points, points[1:]):
        if t0 >= duration:
            break
        total += v * (min(t1, duration) - t0)
    if points[-1][0] < duration:
        total += points[-1][1] * (duration - points[-1][0])
    return total


def check_conservation(events, regime, *, config_size=None, pbj_floor=0, pool_size=0,
                       pbj_bound=None, ws_bound=None):
    """Assert the resource-accounting invariants on every event snapshot."""
    for r in events:
        s = r["state"]
        assert s["pbj_idle"] == s["pbj_owned"] - s["running_alloc"], r
        assert s["pbj_idle"] >= 0, r
        assert s["ws_held"] >= 0 and s["free"] >= 0, r
        if regime in ("DCS", "FB", "FLB_NUB") and r["kind"] == "ws_demand_change":
            # Demand is absolute: holdings track it the instant it changes.
            assert s["ws_held"] == r["payload"]["demand"], r
        if regime == "DCS":
            assert s["pbj_owned"] == pbj_bound, r
            assert s["ws_held"] <= ws_bound, r
        if regime == "FB":
            assert s["ws_held"] + s["pbj_owned"] + s["free"] == config_size, r
            assert s["ws_held"] + s["pbj_owned"] <= config_size, r
            if pbj_bound is not None:
                assert s["pbj_owned"] <= pbj_bound, r
                if r["kind"] == "lease_tick":
                    # The tick pushes every free node to the batch RE, up to
                    # its agreement bound.
                    assert s["pbj_owned"] == min(pbj_bound, config_size - s["ws_held"]), r
        if regime == "FLB_NUB":
            assert s["pbj_owned"] >= pbj_floor, r
            assert s["pbj_pool"] + s["ws_pool"] <= pool_size, r
            assert 0 <= s["pbj_pool"] <= s["pbj_owned"], r
            assert 0 <= s["ws_pool"] <= s["ws_held"], r


def greedy_kill_reference(running, needed):
    """Brute-force greedy victim order: minimum size, then latest start.

    `running` is a list of (job_id, size, start_time, start_seq) tuples;
    returns (victim id sequence, total nodes released).
    """
    pool = list(running)
    victims = []
    released = 0
    while released < needed:
        pool.sort(key=lambda r: (r[1], -r[2], -r[3]))
        victim = pool.pop(0)
        victims.append(victim[0])
        released += victim[1]
    return victims, released


def job_times(events):
    """Per-job start and completion times extracted from an event log."""
    starts: dict[int, list[int]] = {}
    completions: dict[int, int] = {}
    for r in events:
        for jid in r.get("started", ()):
            starts.setdefault(jid, []).append(r["time"])
        if r["kind"] == "job_completion":
            completions[r["payload"]["job_id"]] = r["time"]
    return starts, completions


def random_micro_scenario(seed):
    """A tiny random scenario for invariant fuzzing; returns (jobs, demand)."""
    rng = random.Random(seed)
    duration = rng.randint(1200, 4000)
    jobs = []
    t = 0
    for i in range(1, rng.randint(2, 12)):
        t += rng.randint(0, duration // 4)
        if t >= duration:
            break
        jobs.append(Job(i, t, rng.randint(5, duration), rng.randint(1, 12)))
    if not jobs:
        jobs = [Job(1, 0, rng.randint(5, duration), rng.randint(1, 12))]
    job_trace = JobTrace(
        jobs=tuple(jobs), peak_demand=max(j.size for j in jobs), window=(0, duration)
    )
    samples = []
    t = 0
    last = None
    while t <= duration:
        d = rng.randint(0, 9)
        if d != last:
            samples.append((t, d))
            last = d
        t += rng.randint(60, duration // 3)
    demand = DemandTrace(samples=tuple(samples), peak_demand=max(d for _, d in samples))
    return job_trace, demand
