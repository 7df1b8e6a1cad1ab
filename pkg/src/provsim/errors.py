"""Exception types shared across the simulator."""


class ProvsimError(Exception):
    """Base class for all provsim errors."""


class TraceParseError(ProvsimError):
    """A trace file could not be parsed; message names the offending line."""


class EmptyTraceError(ProvsimError):
    """A trace contained no usable entries after filtering/windowing."""


class AgreementError(ProvsimError):
    """An RE agreement failed validation; message names the bad token/field."""


class TransitionError(ProvsimError):
    """An illegal TRE lifecycle transition was requested."""


class PairingError(ProvsimError):
    """Two RE agreements cannot be coordinated."""


class InfeasibleScenarioError(ProvsimError):
    """The scenario cannot be simulated (e.g. WS demand above cluster size)."""


class KernelError(ProvsimError):
    """Internal simulation-kernel invariant violated (e.g. time regression)."""


class ScenarioError(ProvsimError):
    """A scenario file or parameter set is invalid for the chosen regime."""


class SweepError(ProvsimError):
    """A parameter-sweep point failed; message names the point."""
