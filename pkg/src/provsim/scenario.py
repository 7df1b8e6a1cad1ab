"""Scenario files: the reproducibility unit for batch runs and sweeps.

A scenario is a JSON document naming the two traces, the shaping pipeline
(window, CPU normalization, peak-scaling tuple), the provisioning regime and
its parameters, and optional output paths. Trace paths are resolved relative
to the scenario file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

from . import trace as trace_mod
from .errors import ScenarioError
from .policies import PolicyParams, parse_params
from .simkernel import SimResult, run
from .state import REGIME_DCS, REGIME_EC2RS, REGIME_FLB_NUB, REGIMES


@dataclass(frozen=True)
class Scenario:
    """A fully specified simulation scenario."""

    name: str
    pbj_trace: str
    ws_trace: str
    window_start: int
    window_duration: int
    cpus_per_node: int
    prc_pbj: Optional[int]
    prc_ws: Optional[int]
    regime: str
    config_size: Optional[int]
    params: PolicyParams = field(default_factory=PolicyParams)
    pbj_floor: Optional[int] = None
    output_dir: Optional[str] = None
    base_dir: Path = Path(".")

    def validate(self) -> "Scenario":
        if self.regime not in REGIMES:
            raise ScenarioError(f"unknown regime {self.regime!r} (expected one of {REGIMES})")
        if self.window_duration <= 0:
            raise ScenarioError(f"window duration must be positive, got {self.window_duration}")
        if self.cpus_per_node < 1:
            raise ScenarioError(f"cpus_per_node must be >= 1, got {self.cpus_per_node}")
        if (self.prc_pbj is None) != (self.prc_ws is None):
            raise ScenarioError("target peaks must be given for both traces or neither")
        self.params.validate()
        if self.regime == REGIME_EC2RS and self.config_size is not None:
            raise ScenarioError("EC2RS draws from an unbounded provider; omit config_size")
        if self.regime == REGIME_FLB_NUB and self.config_size is not None:
            raise ScenarioError("FLB_NUB draws from an unbounded provider; omit config_size")
        return self

    def identification(self) -> dict[str, Any]:
        """Columns identifying this scenario in reports."""
        ident: dict[str, Any] = {
            "name": self.name,
            "config_size": self.config_size,
            "prc_pbj": self.prc_pbj,
            "prc_ws": self.prc_ws,
            "L_seconds": self.params.L,
        }
        if self.regime == REGIME_FLB_NUB:
            ident.update(B=self.params.B, U=self.params.U, V=self.params.V, G=self.params.G)
        else:
            # FB and EC2RS still lease on the L timer; DCS has no timer at all.
            ident.update(B=None, U=None, V=None, G=None)
            if self.regime == REGIME_DCS:
                ident["L_seconds"] = None
                if self.config_size is None and self.prc_pbj is not None:
                    ident["config_size"] = self.prc_pbj + (self.prc_ws or 0)
        return ident


def _parse_policy_params(raw: Any) -> PolicyParams:
    if raw is None:
        return PolicyParams()
    if isinstance(raw, str):
        return parse_params(raw)
    if isinstance(raw, dict):
        defaults = PolicyParams()
        if "L_minutes" in raw and "L" in raw:
            raise ScenarioError("give either L (seconds) or L_minutes, not both")
        L = defaults.L
        if "L_minutes" in raw:
            L = int(raw["L_minutes"]) * 60
        elif "L" in raw:
            L = int(raw["L"])
        return PolicyParams(
            B=int(raw.get("B", defaults.B)),
            U=float(raw.get("U", defaults.U)),
            V=float(raw.get("V", defaults.V)),
            G=float(raw.get("G", defaults.G)),
            L=L,
        )
    raise ScenarioError(f"params must be a compact string or an object, got {type(raw)!r}")


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario JSON file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid scenario JSON in {path}: {exc}") from None
    return scenario_from_dict(doc, base_dir=path.parent, default_name=path.stem)


def scenario_from_dict(
    doc: dict[str, Any], base_dir: Path = Path("."), default_name: str = "scenario"
) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    try:
        pbj_trace = doc["pbj_trace"]
        ws_trace = doc["ws_trace"]
        regime = doc["regime"]
    except KeyError as exc:
        raise ScenarioError(f"missing scenario field {exc.args[0]!r}") from None
    window = doc.get("window", {})
    targets = doc.get("target_peaks")
    scenario = Scenario(
        name=doc.get("name", default_name),
        pbj_trace=pbj_trace,
        ws_trace=ws_trace,
        window_start=int(window.get("start_offset", 0)),
        window_duration=int(window.get("duration", 0)),
        cpus_per_node=int(doc.get("cpus_per_node", 1)),
        prc_pbj=None if targets is None else int(targets["pbj"]),
        prc_ws=None if targets is None else int(targets["ws"]),
        regime=regime,
        config_size=None if doc.get("config_size") is None else int(doc["config_size"]),
        params=_parse_policy_params(doc.get("params")),
        pbj_floor=None if doc.get("pbj_floor") is None else int(doc["pbj_floor"]),
        output_dir=doc.get("output_dir"),
        base_dir=base_dir,
    )
    return scenario.validate()


def load_traces(scenario: Scenario) -> tuple[trace_mod.JobTrace, trace_mod.DemandTrace]:
    """Load and shape both traces: window, then CPU-normalize, then peak-scale."""
    pbj_path = (scenario.base_dir / scenario.pbj_trace).resolve()
    ws_path = (scenario.base_dir / scenario.ws_trace).resolve()
    try:
        pbj_text = pbj_path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read batch-job trace {pbj_path}: {exc}") from None
    try:
        ws_text = ws_path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read demand trace {ws_path}: {exc}") from None
    jobs = trace_mod.parse_swf(pbj_text)
    jobs = trace_mod.window(jobs, scenario.window_start, scenario.window_duration)
    if scenario.cpus_per_node > 1:
        jobs = trace_mod.normalize_cpus(jobs, scenario.cpus_per_node)
    demand = trace_mod.parse_demand_trace(ws_text)
    if scenario.prc_pbj is not None:
        jobs = trace_mod.scale_to_peak(jobs, scenario.prc_pbj)
        demand = trace_mod.scale_to_peak(demand, scenario.prc_ws)
    return jobs, demand


def run_scenario_obj(scenario: Scenario) -> SimResult:
    """Load traces and execute one scenario."""
    jobs, demand = load_traces(scenario)
    return run(
        jobs,
        demand,
        scenario.regime,
        scenario.params,
        config_size=scenario.config_size,
        pbj_floor=scenario.pbj_floor,
    )


SWEEP_AXES = ("B", "U", "V", "G", "L", "tuple")


def apply_axis(scenario: Scenario, axis: str, value) -> Scenario:
    """Derive a sweep-point scenario by overriding one axis."""
    if axis == "B":
        params = replace(scenario.params, B=int(value))
        return replace(scenario, params=params, name=f"{scenario.name}_B{int(value)}")
    if axis == "U":
        params = replace(scenario.params, U=float(value))
        return replace(scenario, params=params, name=f"{scenario.name}_U{value}")
    if axis == "V":
        params = replace(scenario.params, V=float(value))
        return replace(scenario, params=params, name=f"{scenario.name}_V{value}")
    if axis == "G":
        params = replace(scenario.params, G=float(value))
        return replace(scenario, params=params, name=f"{scenario.name}_G{value}")
    if axis == "L":
        minutes = int(value)
        params = replace(scenario.params, L=minutes * 60)
        return replace(scenario, params=params, name=f"{scenario.name}_L{minutes}")
    if axis == "tuple":
        try:
            pbj, ws = (int(v) for v in str(value).split(":"))
        except ValueError:
            raise ScenarioError(f"tuple axis values look like '128:64', got {value!r}") from None
        derived = replace(scenario, prc_pbj=pbj, prc_ws=ws, name=f"{scenario.name}_{pbj}x{ws}")
        if scenario.regime == REGIME_DCS:
            derived = replace(derived, config_size=None)
        return derived
    raise ScenarioError(f"unknown sweep axis {axis!r} (expected one of {SWEEP_AXES})")
