"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ProbTransformError(ValueError):
    """Base class for all errors raised by probtransform."""


class InvariantViolation(ProbTransformError):
    """A structural invariant failed by more than the tolerance.

    ``check`` names the failed invariant (e.g. ``"normalization"``), ``gap`` is
    the measured numeric violation and ``component`` optionally names the
    offending object (a channel or POVM name from a scenario file).
    """

    def __init__(self, check: str, gap: float, component: str | None = None, detail: str = ""):
        self.check = check
        self.gap = float(gap)
        self.component = component
        where = f"{component}: " if component else ""
        extra = f" ({detail})" if detail else ""
        super().__init__(f"{where}{check} violated, gap {self.gap:.3g}{extra}")


class NotHermitian(InvariantViolation):
    def __init__(self, gap: float, component: str | None = None):
        super().__init__("hermiticity", gap, component)


class NotPsd(InvariantViolation):
    def __init__(self, gap: float, component: str | None = None):
        super().__init__("positivity", gap, component, "most negative eigenvalue")


class NotUnit(InvariantViolation):
    def __init__(self, gap: float, component: str | None = None):
        super().__init__("unit norm", gap, component)


class NotOrthogonal(InvariantViolation):
    def __init__(self, gap: float, component: str | None = None):
        super().__init__("orthogonality", gap, component)


class BadWeights(InvariantViolation):
    def __init__(self, gap: float, component: str | None = None, detail: str = ""):
        super().__init__("weights", gap, component, detail)


class DimMismatch(ProbTransformError):
    pass


class UnknownLabel(ProbTransformError, KeyError):
    def __str__(self) -> str:  # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""


class ZeroProbabilityOutcome(ProbTransformError):
    """Posterior state requested for an outcome whose probability is <= tol."""

    def __init__(self, label: str, probability: float):
        self.label = label
        self.probability = float(probability)
        super().__init__(f"outcome {label!r} has probability {self.probability:.3g}; posterior undefined")


class DegenerateOverlap(ProbTransformError):
    pass


class InfeasibleCounts(ProbTransformError):
    pass


class InvalidModel(ProbTransformError):
    pass


class ScenarioError(ProbTransformError):
    """Scenario file could not be parsed or references unknown names."""
