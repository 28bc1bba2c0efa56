"""Relative-frequency account of context transitions for two dichotomic observables.

An ensemble of ``N`` systems is summarized by counts: ``n_a[i]`` systems with
``A = a_i``, ``n_b[j]`` with ``B = b_j``, the (generally unobservable) joint
counts ``n_joint[i][j]``, and ``m[i][j]``, the number of members of the
filtered ensemble ``T_i`` (size ``n_a[i]``) showing ``B = b_j``.

The finite-N perturbation term ``delta_j`` is computed in exact rational
arithmetic so the total-probability identity with the perturbation term
holds with zero residual.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InfeasibleCounts, InvalidModel
from .interference import Classification, classify_transformation, lambda_report
from .measurement import KrausChannel, outcome_probabilities, povm_from_channel
from .operators import DEFAULT_TOL
from .sequential import sequential_joint
from .states import DensityOperator

BATCH_SIZE = 65536

Matrix2 = tuple[tuple[int, int], tuple[int, int]]


def _int_pair(x) -> tuple[int, int]:
    a, b = (int(v) for v in x)
    return a, b


@dataclass(frozen=True)
class EnsembleCounts:
    N: int
    n_a: tuple[int, int]
    n_b: tuple[int, int]
    n_joint: Matrix2
    m: Matrix2
    # n_joint was synthesized for bookkeeping rather than sampled
    synthetic_joint: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_a", _int_pair(self.n_a))
        object.__setattr__(self, "n_b", _int_pair(self.n_b))
        object.__setattr__(self, "n_joint", tuple(_int_pair(r) for r in self.n_joint))
        object.__setattr__(self, "m", tuple(_int_pair(r) for r in self.m))
        if len(self.n_joint) != 2 or len(self.m) != 2:
            raise InfeasibleCounts("joint and filtered counts must be 2x2")
        N, na, nb, nj, m = self.N, self.n_a, self.n_b, self.n_joint, self.m
        if N < 1:
            raise InfeasibleCounts(f"ensemble size must be positive, got {N}")
        if min(*na, *nb, *nj[0], *nj[1], *m[0], *m[1]) < 0:
            raise InfeasibleCounts("counts must be non-negative")
        if sum(na) != N or sum(nb) != N:
            raise InfeasibleCounts(f"marginal counts {na}, {nb} must each sum to N={N}")
        for i in range(2):
            if nj[i][0] + nj[i][1] != na[i]:
                raise InfeasibleCounts(f"row {i + 1} of joint counts does not sum to n_a[{i + 1}]")
            if m[i][0] + m[i][1] != na[i]:
                raise InfeasibleCounts(f"filtered ensemble T_{i + 1} must contain n_a[{i + 1}]={na[i]} systems")
        for j in range(2):
            if nj[0][j] + nj[1][j] != nb[j]:
                raise InfeasibleCounts(f"column {j + 1} of joint counts does not sum to n_b[{j + 1}]")

    def __add__(self, other: "EnsembleCounts") -> "EnsembleCounts":
        def add2(x, y):
            return tuple(tuple(a + b for a, b in zip(rx, ry)) for rx, ry in zip(x, y))

        return EnsembleCounts(
            self.N + other.N,
            tuple(a + b for a, b in zip(self.n_a, other.n_a)),
            tuple(a + b for a, b in zip(self.n_b, other.n_b)),
            add2(self.n_joint, other.n_joint),
            add2(self.m, other.m),
            self.synthetic_joint or other.synthetic_joint,
        )


class DoubleStochasticity(NamedTuple):
    ok: bool
    deviation: float


def double_stochastic_check(p_trans, tol: float = DEFAULT_TOL) -> DoubleStochasticity:
    """Whether every row and column of ``p_trans`` sums to one within ``tol``."""
    p = np.asarray(p_trans, dtype=float)
    if p.ndim != 2 or not np.all(np.isfinite(p)):
        return DoubleStochasticity(False, math.inf)
    dev = float(max(np.max(np.abs(p.sum(axis=1) - 1.0)), np.max(np.abs(p.sum(axis=0) - 1.0))))
    return DoubleStochasticity(dev <= tol, dev)


@dataclass(frozen=True)
class FrequencyReport:
    """Finite-N frequencies, exact as fractions, plus the perturbation coefficients.

    ``p_trans`` rows are ``None`` for an empty filtered ensemble. ``lam[j]``
    is ``None`` (and ``degenerate[j]`` true) when ``m[0][j] * m[1][j] == 0``.
    """

    counts: EnsembleCounts
    p: tuple[Fraction, Fraction]
    q: tuple[Fraction, Fraction]
    p_trans: tuple[tuple[Fraction, Fraction] | None, tuple[Fraction, Fraction] | None]
    delta: tuple[Fraction, Fraction]
    lam: tuple[float | None, float | None]
    degenerate: tuple[bool, bool]
    double_stochastic: DoubleStochasticity
    identity_residual: tuple[Fraction, Fraction]

    def classify(self, tol: float = DEFAULT_TOL) -> list[Classification | None]:
        return [None if x is None else classify_transformation(x, tol) for x in self.lam]

    def as_dict(self) -> dict:
        def f(x):
            return None if x is None else float(x)

        return {
            "N": self.counts.N,
            "p": [f(x) for x in self.p],
            "q": [f(x) for x in self.q],
            "p_trans": [None if r is None else [f(x) for x in r] for r in self.p_trans],
            "delta": [f(x) for x in self.delta],
            "lambda": list(self.lam),
            "degenerate": list(self.degenerate),
            "double_stochastic": self.double_stochastic.ok,
            "double_stochastic_deviation": self.double_stochastic.deviation,
            "synthetic_joint": self.counts.synthetic_joint,
        }


def frequency_report(c: EnsembleCounts) -> FrequencyReport:
    N = c.N
    p = tuple(Fraction(x, N) for x in c.n_a)
    q = tuple(Fraction(x, N) for x in c.n_b)
    p_trans = tuple(
        None if c.n_a[i] == 0 else tuple(Fraction(c.m[i][j], c.n_a[i]) for j in range(2)) for i in range(2)
    )
    delta = tuple(
        Fraction((c.n_joint[0][j] - c.m[0][j]) + (c.n_joint[1][j] - c.m[1][j]), N) for j in range(2)
    )
    # p_i * p_ij == m_ij / N, also for empty T_i
    weighted = [[Fraction(c.m[i][j], N) for j in range(2)] for i in range(2)]
    residual = tuple(q[j] - (weighted[0][j] + weighted[1][j] + delta[j]) for j in range(2))
    lam: list[float | None] = []
    degenerate = []
    for j in range(2):
        prod = c.m[0][j] * c.m[1][j]
        if prod == 0:
            lam.append(None)
            degenerate.append(True)
        else:
            num = (c.n_joint[0][j] - c.m[0][j]) + (c.n_joint[1][j] - c.m[1][j])
            lam.append(num / (2.0 * math.sqrt(prod)))
            degenerate.append(False)
    if None in p_trans:
        ds = DoubleStochasticity(False, math.inf)
    else:
        ds = double_stochastic_check([[float(x) for x in r] for r in p_trans], tol=1e-12)
    return FrequencyReport(c, p, q, p_trans, delta, tuple(lam), tuple(degenerate), ds, residual)


def observable_lambda(report: FrequencyReport) -> list[float | None]:
    """``lambda_j`` from ``(q_j - sum_i p_i p_ij) / (2 sqrt(p_1 p_1j p_2 p_2j))``.

    Uses only frequencies that can be observed (never the hidden joint
    counts), so it is the estimator to trust for synthesized counts.
    """
    out: list[float | None] = []
    c = report.counts
    for j in range(2):
        prod = c.m[0][j] * c.m[1][j]
        if prod == 0:
            out.append(None)
            continue
        dev = report.q[j] - Fraction(c.m[0][j] + c.m[1][j], c.N)
        out.append(float(dev) * c.N / (2.0 * math.sqrt(prod)))
    return out


# -- models ------------------------------------------------------------------


class ModelKind(str, Enum):
    CLASSICAL_INDEPENDENT = "classical_independent"
    CLASSICAL_PERTURBED = "classical_perturbed"
    QUANTUM_DRIVEN = "quantum_driven"


class ExactQuantities(NamedTuple):
    p: np.ndarray
    p_trans: np.ndarray
    q: np.ndarray
    delta: np.ndarray
    lam: list[float | None]


def _prob_vector(x, n: int, what: str, tol: float) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (n,) or not np.all(np.isfinite(v)):
        raise InvalidModel(f"{what} must be a length-{n} vector")
    if np.any(v < -tol) or abs(v.sum() - 1.0) > tol:
        raise InvalidModel(f"{what} must be a probability vector, got {v.tolist()}")
    v = np.clip(v, 0.0, None)
    return v / v.sum()


@dataclass(frozen=True, eq=False)
class ContextModel:
    """Preparation context generating ensembles.

    ``classical_independent``
        hidden joint ``(A, B)`` drawn from ``joint``; the filters leave ``B``
        untouched, so ``m == n_joint``.
    ``classical_perturbed``
        as above, then each member of ``T_i`` with hidden ``B = b`` has its
        value resampled from row ``b`` of ``kernels[i]``.
    ``quantum_driven``
        ``A`` outcomes from measuring ``first`` on ``state``; ``T_i`` members
        are measured with ``second`` on the corresponding posterior state;
        ``n_b`` comes from an independent batch of direct ``second``
        measurements on ``state``.
    """

    kind: ModelKind
    joint: np.ndarray | None = None
    kernels: tuple[np.ndarray, np.ndarray] | None = None
    state: DensityOperator | None = None
    first: KrausChannel | None = None
    second: KrausChannel | None = None
    seed: int = 0
    tol: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        try:
            kind = ModelKind(self.kind)
        except ValueError:
            raise InvalidModel(f"unknown model kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if kind is ModelKind.QUANTUM_DRIVEN:
            if self.state is None or self.first is None or self.second is None:
                raise InvalidModel("quantum_driven needs a state and two channels")
            if len(self.first) != 2 or len(self.second) != 2:
                raise InvalidModel("quantum_driven needs two dichotomic channels")
            if not self.state.dim == self.first.dim == self.second.dim:
                raise InvalidModel("state and channel dimensions differ")
            return
        if self.joint is None:
            raise InvalidModel(f"{kind.value} needs a 2x2 joint distribution")
        joint = _prob_vector(np.asarray(self.joint, dtype=float).ravel(), 4, "joint", self.tol).reshape(2, 2)
        object.__setattr__(self, "joint", joint)
        if kind is ModelKind.CLASSICAL_PERTURBED:
            if self.kernels is None or len(self.kernels) != 2:
                raise InvalidModel("classical_perturbed needs two 2x2 filter kernels")
            ks = []
            for i, k in enumerate(self.kernels):
                k = np.asarray(k, dtype=float)
                if k.shape != (2, 2):
                    raise InvalidModel(f"kernel {i + 1} must be 2x2")
                ks.append(np.array([_prob_vector(r, 2, f"kernel {i + 1} row", self.tol) for r in k]))
            object.__setattr__(self, "kernels", tuple(ks))

    @classmethod
    def classical_independent(cls, joint, seed: int = 0) -> "ContextModel":
        return cls(ModelKind.CLASSICAL_INDEPENDENT, joint=joint, seed=seed)

    @classmethod
    def classical_perturbed(cls, joint, kernels, seed: int = 0) -> "ContextModel":
        return cls(ModelKind.CLASSICAL_PERTURBED, joint=joint, kernels=tuple(kernels), seed=seed)

    @classmethod
    def quantum_driven(cls, state, first, second, seed: int = 0) -> "ContextModel":
        return cls(ModelKind.QUANTUM_DRIVEN, state=state, first=first, second=second, seed=seed)

    def with_seed(self, seed: int) -> "ContextModel":
        return replace(self, seed=seed)

    def _quantum_probs(self):
        pa = outcome_probabilities(self.state, povm_from_channel(self.first))
        joint = sequential_joint(self.state, self.first, self.second).joint
        cond = np.full((2, 2), 0.5)
        for i in range(2):
            if joint[i].sum() > 0:
                cond[i] = joint[i] / joint[i].sum()
        direct = outcome_probabilities(self.state, povm_from_channel(self.second))
        return pa / pa.sum(), cond, direct / direct.sum(), joint

    def exact(self) -> ExactQuantities:
        """Limiting frequencies and interference coefficients of this context."""
        if self.kind is ModelKind.QUANTUM_DRIVEN:
            pa, cond, q, _ = self._quantum_probs()
            lam = lambda_report(self.state, self.first, self.second, self.tol).lambdas
        else:
            pa = self.joint.sum(axis=1)
            q = self.joint.sum(axis=0)
            kernels = self.kernels or (np.eye(2), np.eye(2))
            filtered = np.array([self.joint[i] @ kernels[i] for i in range(2)])
            cond = np.array([filtered[i] / pa[i] if pa[i] > 0 else [np.nan, np.nan] for i in range(2)])
            lam = []
            for j in range(2):
                prod = filtered[0, j] * filtered[1, j]
                lam.append(None if prod <= 0 else float((q[j] - filtered[:, j].sum()) / (2 * math.sqrt(prod))))
        weighted = pa[:, None] * np.nan_to_num(cond)
        return ExactQuantities(pa, cond, q, q - weighted.sum(axis=0), lam)


def _synthesize_joint(N: int, na, nb) -> Matrix2:
    # Bookkeeping only: split n_b across rows in proportion to n_a, respecting both margins.
    lo, hi = max(0, na[0] - nb[1]), min(na[0], nb[0])
    n11 = min(max(int(round(nb[0] * na[0] / N)), lo), hi)
    n12 = na[0] - n11
    n21 = nb[0] - n11
    return (n11, n12), (n21, na[1] - n21)


def _run_batch(model: ContextModel, size: int, rng: np.random.Generator, probs) -> tuple:
    if model.kind is ModelKind.QUANTUM_DRIVEN:
        pa, cond, direct, _ = probs
        na = rng.multinomial(size, pa)
        m = np.array([rng.multinomial(na[i], cond[i]) for i in range(2)])
        nb = rng.multinomial(size, direct)
        return na, nb, None, m
    nj = rng.multinomial(size, model.joint.ravel()).reshape(2, 2)
    if model.kind is ModelKind.CLASSICAL_INDEPENDENT:
        m = nj.copy()
    else:
        m = np.zeros((2, 2), dtype=np.int64)
        for i in range(2):
            for b in range(2):
                m[i] += rng.multinomial(nj[i, b], model.kernels[i][b])
    return nj.sum(axis=1), nj.sum(axis=0), nj, m


def simulate(model: ContextModel, N: int, seed: int | None = None, workers: int = 1) -> EnsembleCounts:
    """Sample an ensemble of ``N`` systems from ``model``.

    Trials are split into fixed-size batches, each with its own substream
    spawned from the master seed (``seed`` or ``model.seed``), so results are
    reproducible and independent of ``workers``.
    """
    if int(N) != N or N < 1:
        raise InvalidModel(f"ensemble size must be a positive integer, got {N}")
    N = int(N)
    seed = model.seed if seed is None else seed
    sizes = [BATCH_SIZE] * (N // BATCH_SIZE)
    if N % BATCH_SIZE:
        sizes.append(N % BATCH_SIZE)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    probs = model._quantum_probs() if model.kind is ModelKind.QUANTUM_DRIVEN else None

    def job(k):
        return _run_batch(model, sizes[k], np.random.default_rng(streams[k]), probs)

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(k) for k in range(len(sizes))]
    na = sum(p[0] for p in parts)
    nb = sum(p[1] for p in parts)
    m = sum(p[3] for p in parts)
    if model.kind is ModelKind.QUANTUM_DRIVEN:
        return EnsembleCounts(N, na, nb, _synthesize_joint(N, na, nb), m, synthetic_joint=True)
    nj = sum(p[2] for p in parts)
    return EnsembleCounts(N, na, nb, nj, m)


# -- convergence -------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    seed: int
    delta: tuple[float, float]
    lam: tuple[float | None, float | None]
    classes: tuple[str, str]


@dataclass(frozen=True)
class ConvergenceStudy:
    rows: tuple[ConvergenceRow, ...]
    summary: list[dict]
    limit_lambda: list[float | None]
    limit_classification: list[Classification | None]
    exact_lambda: list[float | None]

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)


def _fmt(x) -> str:
    return "" if x is None else format(x, ".17g")


def rows_to_csv(rows: Sequence[ConvergenceRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "seed", "delta1", "delta2", "lambda1", "lambda2", "class"])
    for r in rows:
        w.writerow([r.N, r.seed, _fmt(r.delta[0]), _fmt(r.delta[1]), _fmt(r.lam[0]), _fmt(r.lam[1]), ";".join(r.classes)])
    return buf.getvalue()


def convergence_study(
    model: ContextModel,
    N_schedule: Sequence[int],
    seeds: Sequence[int],
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> ConvergenceStudy:
    """Estimate ``delta_j`` and ``lambda_j`` over an increasing ensemble-size schedule.

    The limit estimate of ``lambda_j`` is the mean over seeds at the largest
    ``N``. The summary reports, per ``N``, the seed-mean and the seed spread
    scaled by ``sqrt(N)``.
    """
    schedule = [int(n) for n in N_schedule]
    if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError(f"N_schedule must be strictly increasing, got {schedule}")
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ValueError("need at least one seed")
    rows = []
    for N in schedule:
        for s in seeds:
            rep = frequency_report(simulate(model, N, seed=s, workers=workers))
            lam = tuple(observable_lambda(rep))
            classes = tuple("undefined" if x is None else classify_transformation(x, tol).kind.value for x in lam)
            rows.append(ConvergenceRow(N, s, tuple(float(d) for d in rep.delta), lam, classes))
    summary = []
    for N in schedule:
        at_n = [r for r in rows if r.N == N]
        entry = {"N": N}
        for j in range(2):
            vals = np.array([r.lam[j] for r in at_n if r.lam[j] is not None], dtype=float)
            d = np.array([r.delta[j] for r in at_n], dtype=float)
            entry[f"delta{j + 1}_mean"] = float(d.mean())
            entry[f"lambda{j + 1}_mean"] = float(vals.mean()) if len(vals) else None
            entry[f"lambda{j + 1}_scaled_spread"] = (
                float(math.sqrt(N) * vals.std(ddof=1)) if len(vals) > 1 else None
            )
        summary.append(entry)
    last = summary[-1]
    limit = [last[f"lambda{j + 1}_mean"] for j in range(2)]
    limit_cls = [None if x is None else classify_transformation(x, tol) for x in limit]
    return ConvergenceStudy(tuple(rows), summary, limit, limit_cls, model.exact().lam)
