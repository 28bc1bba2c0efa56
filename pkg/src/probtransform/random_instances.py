"""Random states, channels and scenarios for property checks and searches.

All generators take a ``numpy.random.Generator``.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .interference import lambda_report, LambdaReport
from .measurement import KrausChannel, Povm
from .operators import adjoint
from .states import DensityOperator, PureState


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unit_vector(rng: np.random.Generator, dim: int) -> PureState:
    v = _ginibre(rng, dim, 1)[:, 0]
    return PureState(v / np.linalg.norm(v))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase correction)."""
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_orthonormal_pair(rng: np.random.Generator, dim: int) -> tuple[PureState, PureState]:
    u = random_unitary(rng, dim)
    return PureState(u[:, 0]), PureState(u[:, 1])


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> DensityOperator:
    rank = dim if rank is None else rank
    g = _ginibre(rng, dim, rank)
    rho = g @ adjoint(g)
    return DensityOperator(rho / np.trace(rho).real)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    b = _ginibre(rng, dim, dim)
    return (b + adjoint(b)) / 2


def _labels(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{k + 1}" for k in range(n))


def random_channel(
    rng: np.random.Generator,
    dim: int,
    n_outcomes: int = 2,
    labels: Sequence[str] | None = None,
) -> KrausChannel:
    """Kraus channel cut from a random isometry ``C^d -> C^(n d)``."""
    q, _ = np.linalg.qr(_ginibre(rng, n_outcomes * dim, dim))
    ops = tuple(q[k * dim : (k + 1) * dim] for k in range(n_outcomes))
    return KrausChannel(tuple(labels) if labels else _labels("o", n_outcomes), ops)


def random_projective_channel(
    rng: np.random.Generator,
    dim: int,
    labels: Sequence[str] = ("o1", "o2"),
) -> KrausChannel:
    """Two orthogonal projections in a random basis; each has rank >= 1."""
    u = random_unitary(rng, dim)
    k = int(rng.integers(1, dim)) if dim > 1 else 1
    p = u[:, :k] @ adjoint(u[:, :k])
    return KrausChannel(tuple(labels), (p, np.eye(dim) - p))


def rank_one_projective_channel(basis: Sequence[PureState], labels: Sequence[str] = ("o1", "o2")) -> KrausChannel:
    return KrausChannel(tuple(labels), tuple(np.outer(s.vector, s.vector.conj()) for s in basis))


def random_commuting_pair(
    rng: np.random.Generator, dim: int
) -> tuple[KrausChannel, KrausChannel]:
    """Two dichotomic channels diagonal in one shared random basis."""
    u = random_unitary(rng, dim)

    def diag_channel(prefix):
        t = rng.uniform(0, np.pi / 2, dim)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, (2, dim)))
        d1, d2 = np.cos(t) * phases[0], np.sin(t) * phases[1]
        return KrausChannel(
            _labels(prefix, 2), (u @ np.diag(d1) @ adjoint(u), u @ np.diag(d2) @ adjoint(u))
        )

    return diag_channel("a"), diag_channel("b")


def random_povm(rng: np.random.Generator, dim: int, n_outcomes: int = 3) -> Povm:
    ch = random_channel(rng, dim, n_outcomes)
    return Povm(ch.outcomes, tuple(adjoint(v) @ v for v in ch.kraus_ops))


class SearchResult(NamedTuple):
    state: DensityOperator
    first: KrausChannel
    second: KrausChannel
    report: LambdaReport


def find_hyperbolic_scenario(
    rng: np.random.Generator,
    dim: int = 2,
    min_abs_lambda: float = 1.0,
    min_joint: float = 0.0,
    max_tries: int = 100_000,
) -> SearchResult:
    """Search random non-projective channels and states for ``|lambda_j| >= min_abs_lambda``.

    ``min_joint`` additionally requires both sequential joints of the
    selected outcome to exceed it, which keeps finite-sample estimates of
    ``lambda_j`` well conditioned.
    """
    for _ in range(max_tries):
        rho = random_density(rng, dim, rank=int(rng.integers(1, dim + 1)))
        a = random_channel(rng, dim, 2, ("a1", "a2"))
        b = random_channel(rng, dim, 2, ("b1", "b2"))
        rep = lambda_report(rho, a, b)
        for e in rep.entries:
            if e.lam is not None and abs(e.lam) >= min_abs_lambda and min(e.joint) > min_joint:
                return SearchResult(rho, a, b, rep)
    raise RuntimeError(f"no scenario with |lambda| >= {min_abs_lambda} in {max_tries} tries")
