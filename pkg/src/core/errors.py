class BeamscanError(Exception):
    """Base class for every error raised by beamscan."""


class InvariantViolation(BeamscanError, ValueError):
    """A domain value breaks one of its invariants."""


class ScenarioParseError(BeamscanError, ValueError):
    """A scenario or codebook file is malformed or uses an unsupported schema."""


class UsageError(BeamscanError, ValueError):
    """A request is well-formed but asks for something meaningless (e.g. no schemes)."""


class SolverError(BeamscanError, RuntimeError):
    """The boundary optimisation cannot be carried out for the requested size."""
