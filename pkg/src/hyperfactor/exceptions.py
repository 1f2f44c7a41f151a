"""Exception hierarchy shared by all modules."""


class HyperfactorError(Exception):
    """Base class for errors raised by this package."""


class InvalidArityError(HyperfactorError, ValueError):
    """A vertex set or degree order lies outside the allowed range."""


class InvalidHypergraphError(HyperfactorError, ValueError):
    """Edges or vertex sets violate the k-uniform hypergraph invariants."""


class KhgFormatError(InvalidHypergraphError):
    """Malformed ``khg/1`` text; ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UndefinedParameterError(HyperfactorError, ValueError):
    """A density parameter was requested for a pattern without edges."""


class GuardError(HyperfactorError, ValueError):
    """An instance exceeds a desk-scale enumeration guard."""


class AbsorberBuildError(HyperfactorError):
    """The absorbing-set construction failed at a named stage."""

    def __init__(self, stage: str, detail: str = "", trace: dict | None = None):
        super().__init__(f"{stage}: {detail}" if detail else stage)
        self.stage = stage
        self.detail = detail
        self.trace = trace or {}


class AbsorptionError(HyperfactorError, ValueError):
    """A leftover set could not be absorbed."""
