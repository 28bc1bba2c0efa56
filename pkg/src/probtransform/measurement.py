"""POV measures and single-channel Kraus instruments over finite outcome sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimMismatch,
    InvariantViolation,
    NotOrthogonal,
    NotPsd,
    UnknownLabel,
    ZeroProbabilityOutcome,
)
from .operators import DEFAULT_TOL, adjoint, as_operator, hermitian_gap, identity, inner, min_eigenvalue, outer
from .states import DensityOperator, PureState


def _check_labels(labels: Sequence[str]) -> tuple[str, ...]:
    labels = tuple(str(x) for x in labels)
    if not labels:
        raise ValueError("outcome set must be non-empty")
    if len(set(labels)) != len(labels):
        raise ValueError(f"outcome labels must be unique: {labels}")
    return labels


class _Labelled:
    outcomes: tuple[str, ...]

    def index(self, label: str) -> int:
        try:
            return self.outcomes.index(label)
        except ValueError:
            raise UnknownLabel(f"unknown outcome label {label!r}; known: {list(self.outcomes)}") from None

    def __len__(self) -> int:
        return len(self.outcomes)


def normalization_gap(ops: Iterable[np.ndarray], dim: int) -> float:
    """``max|sum(ops) - I|`` entrywise."""
    return float(np.max(np.abs(sum(ops) - np.eye(dim))))


@dataclass(frozen=True, eq=False)
class Povm(_Labelled):
    """Positive operators, one per outcome label, summing to the identity.

    Validity is checked once here; the probability routines trust it.
    """

    outcomes: tuple[str, ...]
    elements: tuple[np.ndarray, ...]
    tol: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        labels = _check_labels(self.outcomes)
        if len(self.elements) != len(labels):
            raise DimMismatch(f"{len(labels)} labels but {len(self.elements)} elements")
        elems = tuple(as_operator(e) for e in self.elements)
        dim = elems[0].shape[0]
        for lab, e in zip(labels, elems):
            if e.shape[0] != dim:
                raise DimMismatch(f"element {lab!r} has dimension {e.shape[0]}, expected {dim}")
            h = hermitian_gap(e)
            if h > self.tol:
                raise InvariantViolation("hermiticity", h, f"element {lab!r}")
            lo = min_eigenvalue(e)
            if lo < -self.tol:
                raise NotPsd(-lo, f"element {lab!r}")
        gap = normalization_gap(elems, dim)
        if gap > self.tol:
            raise InvariantViolation("normalization", gap, detail="elements must sum to identity")
        object.__setattr__(self, "outcomes", labels)
        object.__setattr__(self, "elements", elems)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def element(self, label: str) -> np.ndarray:
        return self.elements[self.index(label)]

    def effect(self, subset: Iterable[str]) -> np.ndarray:
        """``M(E)`` for a set of labels, by additivity over its members."""
        idx = {self.index(lab) for lab in subset}
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for k in sorted(idx):
            out = out + self.elements[k]
        return out


@dataclass(frozen=True, eq=False)
class KrausChannel(_Labelled):
    """Kraus family ``{V(a_i)}`` with ``sum V^dagger V = I``; one operator per outcome."""

    outcomes: tuple[str, ...]
    kraus_ops: tuple[np.ndarray, ...]
    tol: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        labels = _check_labels(self.outcomes)
        if len(self.kraus_ops) != len(labels):
            raise DimMismatch(f"{len(labels)} labels but {len(self.kraus_ops)} Kraus operators")
        ops = tuple(as_operator(k) for k in self.kraus_ops)
        dim = ops[0].shape[0]
        if any(k.shape[0] != dim for k in ops):
            raise DimMismatch("Kraus operators have differing dimensions")
        gap = normalization_gap((adjoint(k) @ k for k in ops), dim)
        if gap > self.tol:
            raise InvariantViolation("normalization", gap, detail="sum of V^dagger V must equal identity")
        object.__setattr__(self, "outcomes", labels)
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    def op(self, label: str) -> np.ndarray:
        return self.kraus_ops[self.index(label)]

    @classmethod
    def identity(cls, dim: int, label: str = "id") -> "KrausChannel":
        return cls((label,), (identity(dim),))


def _check_dims(rho: DensityOperator, obj) -> None:
    if rho.dim != obj.dim:
        raise DimMismatch(f"state has dimension {rho.dim}, measurement has {obj.dim}")


def clamp_unit(p: float, tol: float) -> float:
    if -tol <= p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + tol:
        return 1.0
    return p


def probability(rho: DensityOperator, m: Povm, subset: Iterable[str]) -> float:
    """``tr{rho M(E)}`` for the label set ``subset``."""
    _check_dims(rho, m)
    p = float(np.real(np.trace(rho.matrix @ m.effect(subset))))
    return clamp_unit(p, m.tol)


def outcome_probabilities(rho: DensityOperator, m: Povm) -> np.ndarray:
    _check_dims(rho, m)
    return np.array([clamp_unit(float(np.real(np.trace(rho.matrix @ e))), m.tol) for e in m.elements])


def povm_from_channel(ch: KrausChannel) -> Povm:
    return Povm(ch.outcomes, tuple(adjoint(v) @ v for v in ch.kraus_ops), tol=ch.tol)


def unnormalized_posterior(rho: DensityOperator, v: np.ndarray) -> np.ndarray:
    return v @ rho.matrix @ adjoint(v)


def posterior(rho: DensityOperator, ch: KrausChannel, label: str) -> tuple[float, DensityOperator]:
    """Outcome probability and normalized conditional state ``V rho V^dagger / p``.

    Raises
    ------
    ZeroProbabilityOutcome
        When ``p <= tol``; the exception carries the probability.
    """
    _check_dims(rho, ch)
    sigma = unnormalized_posterior(rho, ch.op(label))
    p = clamp_unit(float(np.real(np.trace(sigma))), ch.tol)
    if p <= ch.tol:
        raise ZeroProbabilityOutcome(label, p)
    return p, DensityOperator(sigma / p, tol=ch.tol)


def unconditional_posterior(rho: DensityOperator, ch: KrausChannel) -> DensityOperator:
    """State after the measurement when its outcome is ignored: ``sum_i V_i rho V_i^dagger``."""
    _check_dims(rho, ch)
    return DensityOperator(sum(unnormalized_posterior(rho, v) for v in ch.kraus_ops), tol=ch.tol)


def filter_povm(
    phi1: PureState,
    phi2: PureState,
    labels: Sequence[str] = ("lambda1", "lambda2", "lambda3"),
    tol: float = DEFAULT_TOL,
) -> Povm:
    """Three-outcome filter measurement: "in phi1", "in phi2", "in neither".

    The third element is ``I - |phi1><phi1| - |phi2><phi2|``, the zero matrix
    when the space is two-dimensional.
    """
    if phi1.dim != phi2.dim:
        raise DimMismatch(f"states have dimensions {phi1.dim} and {phi2.dim}")
    if phi1.dim < 2:
        raise DimMismatch("filter measurement needs dimension >= 2")
    overlap = abs(inner(phi1.vector, phi2.vector))
    if overlap > tol:
        raise NotOrthogonal(overlap)
    p1, p2 = outer(phi1.vector), outer(phi2.vector)
    return Povm(tuple(labels), (p1, p2, np.eye(phi1.dim) - p1 - p2), tol=tol)
