"""Quantum states: density operators, pure states, superpositions and mixtures."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadWeights, DimMismatch, NotHermitian, NotOrthogonal, NotPsd, NotUnit, InvariantViolation
from .operators import (
    DEFAULT_TOL,
    as_operator,
    as_vector,
    hermitian_gap,
    inner,
    min_eigenvalue,
    outer,
)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace operator.

    The matrix is validated on construction and stored read-only.
    """

    matrix: np.ndarray
    tol: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        m = np.array(as_operator(self.matrix))
        gap = hermitian_gap(m)
        if gap > self.tol:
            raise NotHermitian(gap, "state")
        m = (m + m.conj().T) / 2
        lo = min_eigenvalue(m)
        if lo < -self.tol:
            raise NotPsd(-lo, "state")
        tr_gap = abs(np.trace(m).real - 1.0)
        if tr_gap > self.tol:
            raise InvariantViolation("unit trace", tr_gap, "state")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True, eq=False)
class PureState:
    vector: np.ndarray
    tol: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        v = as_vector(self.vector)
        gap = abs(float(np.linalg.norm(v)) - 1.0)
        if gap > self.tol:
            raise NotUnit(gap, "state")
        object.__setattr__(self, "vector", v)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]


def basis_state(dim: int, k: int) -> PureState:
    v = np.zeros(dim, dtype=np.complex128)
    v[k] = 1.0
    return PureState(v)


def pure_to_density(psi: PureState) -> DensityOperator:
    return DensityOperator(outer(psi.vector), tol=psi.tol)


def superpose(
    phi1: PureState,
    phi2: PureState,
    alpha: complex,
    beta: complex,
    tol: float = DEFAULT_TOL,
) -> PureState:
    """Return ``alpha*phi1 + beta*phi2`` for orthogonal unit vectors.

    Non-orthogonal inputs are rejected rather than renormalized.
    """
    if phi1.dim != phi2.dim:
        raise DimMismatch(f"states have dimensions {phi1.dim} and {phi2.dim}")
    overlap = abs(inner(phi1.vector, phi2.vector))
    if overlap > tol:
        raise NotOrthogonal(overlap)
    w_gap = abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0)
    if w_gap > tol:
        raise BadWeights(w_gap, detail="|alpha|^2 + |beta|^2 must equal 1")
    return PureState(alpha * phi1.vector + beta * phi2.vector, tol=tol)


def mix(
    weights: Sequence[float],
    states: Sequence[DensityOperator],
    tol: float = DEFAULT_TOL,
) -> DensityOperator:
    """Convex combination ``sum_k weights[k] * states[k]``."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or len(w) != len(states) or len(w) == 0:
        raise BadWeights(float("nan"), detail="need one weight per state")
    if np.any(w < -tol):
        raise BadWeights(float(-w.min()), detail="negative weight")
    s_gap = abs(float(w.sum()) - 1.0)
    if s_gap > tol:
        raise BadWeights(s_gap, detail="weights must sum to 1")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise DimMismatch(f"states have differing dimensions {sorted(dims)}")
    total = sum(wk * s.matrix for wk, s in zip(w, states))
    return DensityOperator(total, tol=tol)
