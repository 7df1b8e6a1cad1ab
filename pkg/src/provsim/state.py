"""Shared state records for the simulation kernel and the provisioning policies."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .trace import Job

REGIME_DCS = "DCS"
REGIME_FB = "FB"
REGIME_FLB_NUB = "FLB_NUB"
REGIME_EC2RS = "EC2RS"
REGIMES = (REGIME_DCS, REGIME_FB, REGIME_FLB_NUB, REGIME_EC2RS)

ACTOR_PBJ = "pbj_manager"
ACTOR_WS = "ws_manager"
ACTOR_PROVISION = "provision_service"

KIND_JOB_COMPLETION = "job_completion"
KIND_WS_DEMAND_CHANGE = "ws_demand_change"
KIND_LEASE_TICK = "lease_tick"
KIND_PBJ_MANAGE_TICK = "pbj_manage_tick"
KIND_JOB_ARRIVAL = "job_arrival"

# Total event order at equal times: completions free resources before anything
# reacts, resource decisions see the freed state, arrivals come last.
KIND_PRIORITY = {
    KIND_JOB_COMPLETION: 0,
    KIND_WS_DEMAND_CHANGE: 1,
    KIND_LEASE_TICK: 2,
    KIND_PBJ_MANAGE_TICK: 3,
    KIND_JOB_ARRIVAL: 4,
}


@dataclass(frozen=True)
class Event:
    """A scheduled simulation event; seq breaks remaining ties deterministically."""

    time: int
    kind: str
    seq: int
    payload: Any = None

    def sort_key(self) -> tuple[int, int, int]:
        return (self.time, KIND_PRIORITY[self.kind], self.seq)


@dataclass
class RunningJob:
    job: Job
    start_time: int
    alloc: int
    attempt: int
    start_seq: int


@dataclass
class AdjustmentLog:
    """Every dynamic request/release/provisioning of resources, in event order."""

    entries: list[tuple[int, str, int]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.entries)

    def record(self, time: int, actor: str, delta: int) -> None:
        if delta == 0:
            raise ValueError("adjustment entries must have nonzero delta")
        self.entries.append((time, actor, delta))


@dataclass
class ClusterState:
    """Mutable resource-accounting state shared by the kernel and the policies.

    ``pbj_bound``/``ws_bound`` are the per-RE agreement bounds (the scaled
    trace peaks). In FB they cap holdings; in DCS they are the static
    partitions; FLB_NUB and EC2RS have no upper cap. ``free`` is the
    provision service's unallocated set inside a bounded cluster. The
    ``pbj_pool``/``ws_pool`` counters track how much of each RE's holdings
    is charged to the coordinated pool in FLB_NUB (first-come); holdings
    beyond them are externally leased.
    """

    regime: str
    config_size: Optional[int]
    pool_size: int
    pbj_bound: Optional[int]
    ws_bound: Optional[int]
    pbj_floor: int = 0
    pbj_owned: int = 0
    pbj_idle: int = 0
    ws_held: int = 0
    free: int = 0
    pbj_pool: int = 0
    ws_pool: int = 0
    ws_demand: int = 0
    clock: int = 0
    running: dict[int, RunningJob] = field(default_factory=dict)
    queue: list[Job] = field(default_factory=list)
    attempts: dict[int, int] = field(default_factory=dict)
    start_seq: int = 0

    @property
    def running_alloc(self) -> int:
        return sum(r.alloc for r in self.running.values())

    @property
    def pbj_external(self) -> int:
        return self.pbj_owned - self.pbj_pool

    @property
    def ws_external(self) -> int:
        return self.ws_held - self.ws_pool

    def queued_sizes_sum(self) -> int:
        return sum(j.size for j in self.queue)

    def snapshot(self) -> dict[str, int]:
        """Post-event accounting snapshot embedded in the event log."""
        return {
            "pbj_owned": self.pbj_owned,
            "pbj_idle": self.pbj_idle,
            "running_alloc": self.running_alloc,
            "ws_held": self.ws_held,
            "free": self.free,
            "pbj_pool": self.pbj_pool,
            "ws_pool": self.ws_pool,
            "pbj_external": self.pbj_external,
            "ws_external": self.ws_external,
            "queue_len": len(self.queue),
            "queued_demand": self.queued_sizes_sum(),
        }
