"""Two-step measurements: joint statistics in both orders and the quantum Bayes analog."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimMismatch
from .measurement import KrausChannel, Povm, clamp_unit, outcome_probabilities, povm_from_channel, unconditional_posterior
from .operators import adjoint
from .states import DensityOperator

PRODUCT_SEP = "×"


def product_label(a: str, b: str) -> str:
    return f"{a}{PRODUCT_SEP}{b}"


@dataclass(frozen=True, eq=False)
class SequentialResult:
    first: tuple[str, ...]
    second: tuple[str, ...]
    joint: np.ndarray
    marginal_second: np.ndarray
    composed_povm: Povm


class BayesCheck(NamedTuple):
    lhs: np.ndarray
    rhs: np.ndarray
    max_gap: float


def _check(rho: DensityOperator, first: KrausChannel, second: KrausChannel) -> None:
    if not rho.dim == first.dim == second.dim:
        raise DimMismatch(f"dimensions differ: state {rho.dim}, first {first.dim}, second {second.dim}")


def _joint(rho: DensityOperator, first: KrausChannel, second: KrausChannel) -> np.ndarray:
    r = rho.matrix
    tol = max(first.tol, second.tol)
    joint = np.empty((len(first), len(second)))
    for i, v in enumerate(first.kraus_ops):
        sigma = v @ r @ adjoint(v)
        for j, w in enumerate(second.kraus_ops):
            joint[i, j] = clamp_unit(float(np.real(np.trace(w @ sigma @ adjoint(w)))), tol)
    return joint


def sequential_joint(rho: DensityOperator, first: KrausChannel, second: KrausChannel) -> SequentialResult:
    """Statistics of measuring ``first`` and then ``second`` on ``rho``.

    ``joint[i, j] = tr[W_j V_i rho V_i^dagger W_j^dagger]``. The trace form is
    used for every entry, so rows belonging to zero-probability first
    outcomes are well defined (they are zero).
    """
    _check(rho, first, second)
    joint = _joint(rho, first, second)
    labels = []
    elems = []
    for a, v in zip(first.outcomes, first.kraus_ops):
        for b, w in zip(second.outcomes, second.kraus_ops):
            wv = w @ v
            labels.append(product_label(a, b))
            elems.append(adjoint(wv) @ wv)
    composed = Povm(tuple(labels), tuple(elems), tol=max(first.tol, second.tol))
    return SequentialResult(
        first=first.outcomes,
        second=second.outcomes,
        joint=joint,
        marginal_second=joint.sum(axis=0),
        composed_povm=composed,
    )


def reversed_joint(rho: DensityOperator, first: KrausChannel, second: KrausChannel) -> np.ndarray:
    """``[i, j] = tr[rho W_j^dagger V_i^dagger V_i W_j]``: ``second`` measured before ``first``.

    Indexed like :func:`sequential_joint` (first-channel outcome on rows), so
    the two matrices can be compared entrywise.
    """
    _check(rho, first, second)
    r = rho.matrix
    tol = max(first.tol, second.tol)
    out = np.empty((len(first), len(second)))
    for j, w in enumerate(second.kraus_ops):
        sigma = w @ r @ adjoint(w)
        for i, v in enumerate(first.kraus_ops):
            out[i, j] = clamp_unit(float(np.real(np.trace(v @ sigma @ adjoint(v)))), tol)
    return out


def quantum_bayes_check(rho: DensityOperator, first: KrausChannel, second: KrausChannel) -> BayesCheck:
    """Compare second-measurement statistics on the unconditional post-``first`` state
    with the first-outcome-marginalized joint distribution."""
    _check(rho, first, second)
    lhs = outcome_probabilities(unconditional_posterior(rho, first), povm_from_channel(second))
    rhs = _joint(rho, first, second).sum(axis=0)
    return BayesCheck(lhs, rhs, float(np.max(np.abs(lhs - rhs))))
