"""
Exception hierarchy for penner_closed.
"""

from typing import Any, Dict, Optional


class PennerError(Exception):
    """Base class for all library errors."""


class DomainError(PennerError, ValueError):
    """Argument outside the domain of an operation."""


class TriangulationError(PennerError, ValueError):
    """A combinatorial map violates a triangulation invariant."""

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        message = f"invariant violated: {invariant}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class FlipNotDefined(PennerError):
    """Both sides of the edge lie in one triangle."""


class FlipDegenerate(PennerError):
    """The flipped edge would have lambda-length zero."""

    def __init__(self, edge: int, signed_sum: Any):
        self.edge = edge
        self.signed_sum = signed_sum
        super().__init__(f"flip at edge {edge} is degenerate: signed Ptolemy sum {signed_sum}")


class NotFactorizable(PennerError):
    """Lower-left entry vanishes, no u(x)v(y)u(z) factorization."""


class NotHyperbolic(PennerError):
    """|trace| <= 2."""


class NotALoop(PennerError):
    """Path does not close up (endpoint not +-identity or word not closed)."""


class StepTooCoarse(PennerError):
    """Accumulated angle is too far from a multiple of pi."""

    def __init__(self, residual: float, message: str = ""):
        self.residual = residual
        super().__init__(message or f"winding residual {residual:.3e} above gate")


class SamplerFailed(PennerError):
    """Retry budget exhausted while solving for a chart point."""

    def __init__(self, attempts: int, diagnostics: Optional[Dict[str, Any]] = None):
        self.attempts = attempts
        self.diagnostics = diagnostics or {}
        super().__init__(f"no positive root after {attempts} attempts: {self.diagnostics}")


class EdgeDegenerate(PennerError):
    """A side holonomy has vanishing lower-left entry (lambda = 0)."""

    def __init__(self, half_edge: int, value: Any):
        self.half_edge = half_edge
        self.value = value
        super().__init__(f"half-edge {half_edge} has lambda-length {value}")


class ConventionMismatch(PennerError):
    """Holonomy does not have the expected normal form."""

    def __init__(self, message: str, holonomy: Any = None):
        self.holonomy = holonomy
        if holonomy is not None:
            message = f"{message}; holonomy={holonomy!r}"
        super().__init__(message)
