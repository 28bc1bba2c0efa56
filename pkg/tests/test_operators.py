import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from probtransform.errors import DimMismatch, NotHermitian, NotPsd
from probtransform.operators import (
    adjoint,
    as_operator,
    hermitian_eigen,
    identity,
    is_hermitian,
    is_projection,
    is_psd,
    is_unit,
    outer,
    psd_sqrt,
    trace,
)
from probtransform.random_instances import random_hermitian, random_unit_vector

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=6)


def ginibre(rng, d):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def test_adjoint_examples(rng):
    np.testing.assert_array_equal(adjoint(identity(2)), identity(2))
    np.testing.assert_array_equal(adjoint(np.array([[0, 1], [0, 0]])), [[0, 0], [1, 0]])
    h = random_hermitian(rng, 3)
    assert np.max(np.abs(adjoint(h) - h)) == 0.0


def test_trace_examples(rng):
    assert trace(identity(5)) == 5
    v = random_unit_vector(rng, 4).vector
    assert trace(outer(v)) == pytest.approx(1.0, abs=1e-12)
    h = random_hermitian(rng, 4)
    assert trace(h).real == pytest.approx(np.linalg.eigvalsh(h).sum(), abs=1e-12)


def test_hermitian_eigen_examples(rng):
    w, _ = hermitian_eigen(np.diag([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(w, [1, 2, 3])
    w, _ = hermitian_eigen(np.array([[0, 1], [1, 0]]))
    np.testing.assert_allclose(w, [-1, 1], atol=1e-15)
    h = random_hermitian(rng, 5)
    w, v = hermitian_eigen(h)
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.abs((v * w) @ adjoint(v) - h)) <= 1e-10


def test_hermitian_eigen_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigen(np.array([[0, 1], [0, 0]]))


def test_psd_sqrt_examples(rng):
    np.testing.assert_allclose(psd_sqrt(identity(3)), np.eye(3), atol=1e-15)
    np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
    b = ginibre(rng, 4)
    a = adjoint(b) @ b
    r = psd_sqrt(a)
    assert np.max(np.abs(r @ r - a)) <= 1e-10
    assert is_psd(r)


def test_psd_sqrt_clamps_tiny_negative_eigenvalues():
    a = np.diag([1.0, -1e-12])
    np.testing.assert_allclose(psd_sqrt(a), np.diag([1.0, 0.0]))
    with pytest.raises(NotPsd):
        psd_sqrt(np.diag([1.0, -1e-3]))


def test_structural_flags():
    p = np.diag([1.0, 0.0])
    assert is_projection(p) and is_psd(p) and is_hermitian(p)
    assert not is_projection(np.diag([0.5, 0.0]))
    assert not is_hermitian(np.array([[0, 1j], [1j, 0]]))
    assert is_unit(np.array([0.6, 0.8j]))
    assert not is_unit(np.array([1.0, 1.0]))


def test_as_operator_rejects_bad_shapes():
    with pytest.raises(DimMismatch):
        as_operator(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        as_operator([[np.nan, 0], [0, 1]])
    a = as_operator(np.eye(2))
    with pytest.raises(ValueError):
        a[0, 0] = 2.0


@settings(max_examples=60, deadline=None)
@given(seed=seeds, d=dims)
def test_adjoint_involution(seed, d):
    a = ginibre(np.random.default_rng(seed), d)
    np.testing.assert_array_equal(adjoint(adjoint(a)), a)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, d=dims)
def test_trace_cyclic(seed, d):
    rng = np.random.default_rng(seed)
    a, b = ginibre(rng, d), ginibre(rng, d)
    assert abs(trace(a @ b) - trace(b @ a)) <= 1e-12 * max(1.0, np.abs(a).max() * np.abs(b).max() * d)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, d=dims)
def test_sqrt_commutes_and_eigenvectors_orthonormal(seed, d):
    rng = np.random.default_rng(seed)
    b = ginibre(rng, d)
    a = adjoint(b) @ b
    r = psd_sqrt(a)
    assert np.max(np.abs(r @ a - a @ r)) <= 1e-9 * max(1.0, np.abs(a).max() ** 1.5)
    _, v = hermitian_eigen(random_hermitian(rng, d))
    assert np.max(np.abs(adjoint(v) @ v - np.eye(d))) <= 1e-10
