"""Interference terms relating direct and sequential measurement statistics.

Covers the superposition and mixture decompositions of a single POVM
probability, the interference coefficient ``lambda_j`` that measures how far
a direct second-measurement probability departs from the total-probability
sum over first outcomes, its admissible range, the rank-one projective
closed form, and the classical / trigonometric / hyperbolic classification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateOverlap, DimMismatch, NotOrthogonal
from .measurement import KrausChannel, Povm, povm_from_channel, outcome_probabilities, probability
from .operators import DEFAULT_TOL, commutator, inner, psd_sqrt
from .sequential import reversed_joint, sequential_joint
from .states import DensityOperator, PureState, mix, pure_to_density, superpose


class Kind(str, Enum):
    CLASSICAL = "classical"
    TRIGONOMETRIC = "trigonometric"
    HYPERBOLIC = "hyperbolic"


class Classification(NamedTuple):
    kind: Kind
    phase: float
    sign: int


def classify_transformation(lam: float, tol: float = DEFAULT_TOL) -> Classification:
    """Classify an interference coefficient.

    ``|lam| <= tol`` is classical (phase 0, sign 0). ``|lam| < 1`` is trigonometric
    with ``phase = arccos(lam)`` on the principal branch ``[0, pi]``.
    ``|lam| >= 1`` is hyperbolic with ``phase = arccosh(|lam|)``; the sign of
    ``lam`` is returned separately.
    """
    if not math.isfinite(lam):
        raise ValueError(f"lambda must be finite, got {lam}")
    a = abs(lam)
    if a <= tol:
        return Classification(Kind.CLASSICAL, 0.0, 0)
    sign = 1 if lam > 0 else -1
    if a < 1.0:
        return Classification(Kind.TRIGONOMETRIC, math.acos(lam), sign)
    return Classification(Kind.HYPERBOLIC, math.acosh(a), sign)


# -- superposition / mixture -------------------------------------------------


@dataclass(frozen=True)
class SuperpositionDecomposition:
    total: float
    term1: float
    term2: float
    cross: float
    cos_theta: float | None

    @property
    def residual(self) -> float:
        return self.total - (self.term1 + self.term2 + self.cross)


def superposition_rule(
    phi1: PureState,
    phi2: PureState,
    alpha: complex,
    beta: complex,
    m: Povm,
    subset: Iterable[str],
    tol: float = DEFAULT_TOL,
) -> SuperpositionDecomposition:
    """Split ``mu(E; |alpha phi1 + beta phi2><.|)`` into weighted direct terms and a cross term.

    ``total`` is measured on the superposed state itself; the three terms are
    computed separately from ``phi1``, ``phi2`` and ``<phi1, M(E) phi2>``.
    """
    subset = list(subset)
    phi3 = superpose(phi1, phi2, alpha, beta, tol=tol)
    total = probability(pure_to_density(phi3), m, subset)
    mu1 = probability(pure_to_density(phi1), m, subset)
    mu2 = probability(pure_to_density(phi2), m, subset)
    effect = m.effect(subset)
    cross = 2.0 * float(np.real(np.conj(alpha) * beta * inner(phi1.vector, effect @ phi2.vector)))
    denom = 2.0 * abs(alpha * beta) * math.sqrt(mu1 * mu2)
    cos_theta = None
    if denom > tol:
        cos_theta = float(np.clip(cross / denom, -1.0, 1.0))
    return SuperpositionDecomposition(total, abs(alpha) ** 2 * mu1, abs(beta) ** 2 * mu2, cross, cos_theta)


class MixtureDecomposition(NamedTuple):
    total: float
    term1: float
    term2: float


def mixture_rule(
    rho1: DensityOperator,
    rho2: DensityOperator,
    w: float,
    m: Povm,
    subset: Iterable[str],
    tol: float = DEFAULT_TOL,
) -> MixtureDecomposition:
    """Probability on the mixture ``w rho1 + (1-w) rho2`` next to its two weighted parts."""
    subset = list(subset)
    total = probability(mix([w, 1.0 - w], [rho1, rho2], tol=tol), m, subset)
    return MixtureDecomposition(total, w * probability(rho1, m, subset), (1.0 - w) * probability(rho2, m, subset))


# -- lambda ------------------------------------------------------------------


def lambda_bounds(p1: float, p2: float) -> tuple[float, float]:
    """Admissible range of ``lambda_j`` given the two sequential joints ``P{(a_1,b_j)}``, ``P{(a_2,b_j)}``."""
    denom = 2.0 * math.sqrt(p1 * p2)
    return -(p1 + p2) / denom, (1.0 - p1 - p2) / denom


def lambda_from_gamma(p1: float, p2: float, g1: float, g2: float) -> float:
    """``lambda_j`` re-expressed through the reversed-order ratios ``gamma_ij``."""
    return 0.5 * (math.sqrt(p1 / p2) * (g1 - 1.0) + math.sqrt(p2 / p1) * (g2 - 1.0))


@dataclass(frozen=True)
class LambdaEntry:
    """Interference data for one outcome ``b_j`` of the second measurement.

    ``lam`` and everything derived from it are ``None`` when one of the two
    joints is ``<= tol`` (``degenerate``): the coefficient has no value there.
    """

    label: str
    direct: float
    joint: tuple[float, float]
    reversed: tuple[float, float]
    degenerate: bool
    lam: float | None = None
    gamma: tuple[float | None, float | None] = (None, None)
    lambda_via_gamma: float | None = None
    bounds: tuple[float, float] | None = None
    classification: Classification | None = None
    reconstruction_gap: float | None = None

    def as_dict(self) -> dict:
        c = self.classification
        return {
            "label": self.label,
            "direct": self.direct,
            "joint": list(self.joint),
            "reversed_joint": list(self.reversed),
            "degenerate": self.degenerate,
            "lambda": self.lam,
            "gamma": list(self.gamma),
            "lambda_via_gamma": self.lambda_via_gamma,
            "bounds": list(self.bounds) if self.bounds is not None else None,
            "classification": c.kind.value if c else None,
            "phase": c.phase if c else None,
            "sign": c.sign if c else None,
            "reconstruction_gap": self.reconstruction_gap,
        }


@dataclass(frozen=True)
class LambdaReport:
    first: tuple[str, ...]
    second: tuple[str, ...]
    entries: tuple[LambdaEntry, ...]
    commuting: bool
    max_commutator: float
    tol: float = field(default=DEFAULT_TOL)

    def __getitem__(self, label: str) -> LambdaEntry:
        for e in self.entries:
            if e.label == label:
                return e
        raise KeyError(label)

    @property
    def lambdas(self) -> list[float | None]:
        return [e.lam for e in self.entries]

    @property
    def converse_fails(self) -> bool:
        """True when every defined lambda vanishes yet the Kraus operators do not commute.

        Diagnostic only: for a fixed state, ``lambda_j = 0`` does not force
        commutation.
        """
        defined = [e for e in self.entries if e.lam is not None]
        return bool(defined) and all(abs(e.lam) <= self.tol for e in defined) and not self.commuting

    def as_dict(self) -> dict:
        return {
            "first": list(self.first),
            "second": list(self.second),
            "tol": self.tol,
            "commuting": self.commuting,
            "max_commutator": self.max_commutator,
            "zero_lambda_without_commutation": self.converse_fails,
            "outcomes": [e.as_dict() for e in self.entries],
        }


def lambda_report(
    rho: DensityOperator,
    first: KrausChannel,
    second: KrausChannel,
    tol: float = DEFAULT_TOL,
) -> LambdaReport:
    """Interference coefficient ``lambda_j`` for every outcome of ``second``.

    ``first`` must be dichotomic. For each ``b_j``::

        lambda_j = (mu_B(b_j; rho) - P{(a_1,b_j)} - P{(a_2,b_j)}) / (2 sqrt(P{(a_1,b_j)} P{(a_2,b_j)}))

    together with the ratio form via ``gamma_ij = P{(b_j,a_i)} / P{(a_i,b_j)}``
    and the admissible range of ``lambda_j``.
    """
    if len(first) != 2:
        raise DimMismatch(f"first measurement must have exactly 2 outcomes, got {len(first)}")
    seq = sequential_joint(rho, first, second)
    rev = reversed_joint(rho, first, second)
    direct = outcome_probabilities(rho, povm_from_channel(second))
    max_comm = max(
        float(np.max(np.abs(commutator(w, v)))) for w in second.kraus_ops for v in first.kraus_ops
    )
    entries = []
    for j, label in enumerate(second.outcomes):
        p1, p2 = float(seq.joint[0, j]), float(seq.joint[1, j])
        r1, r2 = float(rev[0, j]), float(rev[1, j])
        common = dict(label=label, direct=float(direct[j]), joint=(p1, p2), reversed=(r1, r2))
        if p1 <= tol or p2 <= tol:
            entries.append(LambdaEntry(degenerate=True, **common))
            continue
        root = math.sqrt(p1 * p2)
        lam = (direct[j] - p1 - p2) / (2.0 * root)
        g1, g2 = r1 / p1, r2 / p2
        entries.append(
            LambdaEntry(
                degenerate=False,
                lam=float(lam),
                gamma=(g1, g2),
                lambda_via_gamma=lambda_from_gamma(p1, p2, g1, g2),
                bounds=lambda_bounds(p1, p2),
                classification=classify_transformation(float(lam), tol),
                reconstruction_gap=float(abs(direct[j] - (p1 + p2 + 2.0 * lam * root))),
                **common,
            )
        )
    return LambdaReport(first.outcomes, second.outcomes, tuple(entries), max_comm <= tol, max_comm, tol)


def projective_lambda(
    rho: DensityOperator,
    phi_basis: Sequence[PureState],
    psi_basis: Sequence[PureState],
    j: int,
    tol: float = DEFAULT_TOL,
) -> float:
    """``|lambda_j|`` in closed form for rank-one projective measurements on a qubit.

    ``phi_basis`` defines ``V(a_i) = |phi_i><phi_i|`` and ``psi_basis``
    defines ``W(b_j) = |psi_j><psi_j|``; both must be orthonormal pairs that
    span the space. The result is bounded by 1.
    """
    if len(phi_basis) != 2 or len(psi_basis) != 2:
        raise DimMismatch("need exactly two basis vectors in each basis")
    dims = {rho.dim, *(s.dim for s in phi_basis), *(s.dim for s in psi_basis)}
    if dims != {2}:
        raise DimMismatch("rank-one dichotomic projective measurements require dimension 2")
    for basis in (phi_basis, psi_basis):
        ov = abs(inner(basis[0].vector, basis[1].vector))
        if ov > tol:
            raise NotOrthogonal(ov)
    f1, f2 = phi_basis[0].vector, phi_basis[1].vector
    psi = psi_basis[j].vector
    root = psd_sqrt(rho.matrix, tol)
    s1, s2 = root @ f1, root @ f2
    c1, c2 = inner(psi, f1), inner(psi, f2)
    n1, n2 = float(np.linalg.norm(s1)), float(np.linalg.norm(s2))
    for name, x in (("<psi_j, phi_1>", abs(c1)), ("<psi_j, phi_2>", abs(c2)), ("|sqrt(rho) phi_1|", n1), ("|sqrt(rho) phi_2|", n2)):
        if x <= tol:
            raise DegenerateOverlap(f"{name} = {x:.3g} vanishes")
    num = np.real(inner(s1, s2) * inner(f2, psi) * inner(psi, f1))
    return float(abs(num) / (abs(c1 * c2) * n1 * n2))
