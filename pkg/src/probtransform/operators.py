"""Dense complex linear algebra with structural checks.

Operators and vectors are plain ``numpy`` arrays of dtype ``complex128``.
The ``as_operator`` / ``as_vector`` constructors validate shape and
finiteness and hand back read-only copies, so values can be shared freely.
"""

from __future__ import annotations

import numpy as np

from .errors import DimMismatch, NotHermitian, NotPsd

DEFAULT_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def as_operator(a, dim: int | None = None) -> np.ndarray:
    """Validate ``a`` as a finite square complex matrix; return a read-only copy."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimMismatch(f"operator must be a non-empty square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise DimMismatch(f"operator has dimension {m.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("operator has non-finite entries")
    return _frozen(m)


def as_vector(v, dim: int | None = None) -> np.ndarray:
    """Validate ``v`` as a finite complex vector; return a read-only copy."""
    x = np.array(v, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] == 0:
        raise DimMismatch(f"vector must be one-dimensional and non-empty, got shape {x.shape}")
    if dim is not None and x.shape[0] != dim:
        raise DimMismatch(f"vector has dimension {x.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector has non-finite entries")
    return _frozen(x)


def identity(dim: int) -> np.ndarray:
    return _frozen(np.eye(dim, dtype=np.complex128))


def adjoint(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def trace(a: np.ndarray) -> complex:
    return complex(np.trace(a))


def outer(u: np.ndarray, v: np.ndarray | None = None) -> np.ndarray:
    """``|u><v|`` (``|u><u|`` when ``v`` is omitted)."""
    if v is None:
        v = u
    return np.outer(u, np.conj(v))


def inner(u: np.ndarray, v: np.ndarray) -> complex:
    """``<u, v>``, conjugate-linear in the first slot."""
    return complex(np.vdot(u, v))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def hermitian_gap(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - adjoint(a)))) if a.size else 0.0


def is_hermitian(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return hermitian_gap(a) <= tol


def min_eigenvalue(a: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``a``."""
    return float(np.linalg.eigvalsh((a + adjoint(a)) / 2)[0])


def is_psd(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return is_hermitian(a, tol) and min_eigenvalue(a) >= -tol


def is_projection(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return is_hermitian(a, tol) and float(np.max(np.abs(a @ a - a))) <= tol


def is_unit(v: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return abs(float(np.linalg.norm(v)) - 1.0) <= tol


def hermitian_eigen(a: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian operator.

    Returns
    -------
    eigenvalues : ndarray of float, ascending
    eigenvectors : ndarray
        Columns are the orthonormal eigenvectors, ``eigenvectors[:, k]``
        belonging to ``eigenvalues[k]``.

    Raises
    ------
    NotHermitian
        If ``max|A - A^dagger| > tol``.
    """
    gap = hermitian_gap(a)
    if gap > tol:
        raise NotHermitian(gap)
    # symmetrize so LAPACK sees an exactly Hermitian input
    return np.linalg.eigh((a + adjoint(a)) / 2)


def psd_sqrt(a: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Positive square root of a PSD operator.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero before rooting, which is
    what rank-deficient density operators need.
    """
    w, v = hermitian_eigen(a, tol)
    if w[0] < -tol:
        raise NotPsd(-float(w[0]))
    root = np.sqrt(np.clip(w, 0.0, None))
    return (v * root) @ adjoint(v)
