import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from probtransform.errors import DimMismatch, InvariantViolation, NotOrthogonal, NotPsd, UnknownLabel, ZeroProbabilityOutcome
from probtransform.measurement import (
    KrausChannel,
    Povm,
    filter_povm,
    posterior,
    povm_from_channel,
    probability,
    unconditional_posterior,
)
from probtransform.operators import is_psd, psd_sqrt
from probtransform.random_instances import (
    random_channel,
    random_density,
    random_orthonormal_pair,
    random_povm,
    random_unit_vector,
)
from probtransform.states import DensityOperator, PureState, basis_state, pure_to_density

SQ = 1 / np.sqrt(2)
P0, P1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
PROJ = KrausChannel(("0", "1"), (P0, P1))
PLUS = pure_to_density(PureState([SQ, SQ]))


def test_povm_validation():
    with pytest.raises(InvariantViolation) as exc:
        Povm(("x", "y"), (0.45 * np.eye(2), 0.45 * np.eye(2)))
    assert exc.value.check == "normalization"
    assert exc.value.gap == pytest.approx(0.1)
    with pytest.raises(NotPsd):
        Povm(("x", "y"), (np.diag([1.5, 0.5]), np.diag([-0.5, 0.5])))
    with pytest.raises(ValueError):
        Povm(("x", "x"), (P0, P1))
    with pytest.raises(DimMismatch):
        Povm(("x", "y"), (P0, np.eye(3)))


def test_channel_validation():
    with pytest.raises(InvariantViolation) as exc:
        KrausChannel(("a", "b"), (P0, 0.5 * P1))
    assert exc.value.gap == pytest.approx(0.75)


def test_probability_examples(rng):
    m = random_povm(rng, 3, 4)
    rho = random_density(rng, 3)
    assert probability(rho, m, m.outcomes) == pytest.approx(1.0, abs=1e-12)
    assert probability(rho, m, []) == 0.0
    phi = random_unit_vector(rng, 3)
    for lab in m.outcomes:
        oracle = np.linalg.norm(psd_sqrt(m.element(lab)) @ phi.vector) ** 2
        assert abs(probability(pure_to_density(phi), m, [lab]) - oracle) <= 1e-12


def test_probability_errors(rng):
    m = random_povm(rng, 2, 2)
    with pytest.raises(UnknownLabel):
        probability(random_density(rng, 2), m, ["nope"])
    with pytest.raises(DimMismatch):
        probability(random_density(rng, 3), m, [m.outcomes[0]])


def test_povm_from_channel_examples(rng):
    m = povm_from_channel(PROJ)
    np.testing.assert_array_equal(m.element("0"), P0)
    np.testing.assert_array_equal(m.element("1"), P1)
    half = KrausChannel(("a", "b"), (np.eye(2) * SQ, np.eye(2) * SQ))
    for e in povm_from_channel(half).elements:
        np.testing.assert_allclose(e, np.eye(2) / 2, atol=1e-15)
    m = povm_from_channel(random_channel(rng, 3, 3))
    assert all(is_psd(e) for e in m.elements)
    assert np.max(np.abs(sum(m.elements) - np.eye(3))) <= 1e-10


def test_posterior_examples(rng):
    p, s = posterior(pure_to_density(basis_state(2, 0)), PROJ, "0")
    assert p == pytest.approx(1.0)
    np.testing.assert_allclose(s.matrix, P0)
    p, s = posterior(PLUS, PROJ, "0")
    assert p == pytest.approx(0.5)
    np.testing.assert_allclose(s.matrix, P0, atol=1e-15)
    ch = random_channel(rng, 4, 3)
    rho = random_density(rng, 4)
    assert abs(sum(posterior(rho, ch, lab)[0] for lab in ch.outcomes) - 1.0) <= 1e-12


def test_posterior_zero_probability():
    with pytest.raises(ZeroProbabilityOutcome) as exc:
        posterior(pure_to_density(basis_state(2, 0)), PROJ, "1")
    assert exc.value.probability == 0.0


def test_unconditional_posterior_examples(rng):
    rho = random_density(rng, 3)
    out = unconditional_posterior(rho, KrausChannel.identity(3))
    np.testing.assert_allclose(out.matrix, rho.matrix)
    np.testing.assert_allclose(unconditional_posterior(PLUS, PROJ).matrix, np.diag([0.5, 0.5]), atol=1e-15)
    out = unconditional_posterior(rho, random_channel(rng, 3, 4))
    assert abs(np.trace(out.matrix) - 1) <= 1e-12
    assert is_psd(out.matrix)


def test_filter_povm_examples(rng):
    e0, e1 = basis_state(2, 0), basis_state(2, 1)
    m = filter_povm(e0, e1)
    np.testing.assert_array_equal(m.elements[0], P0)
    np.testing.assert_array_equal(m.elements[1], P1)
    np.testing.assert_array_equal(m.elements[2], np.zeros((2, 2)))
    m3 = filter_povm(basis_state(3, 0), basis_state(3, 1))
    np.testing.assert_array_equal(m3.elements[2], np.diag([0, 0, 1]))
    f1, f2 = random_orthonormal_pair(rng, 4)
    m4 = filter_povm(f1, f2)
    assert all(is_psd(e) for e in m4.elements)
    assert np.max(np.abs(sum(m4.elements) - np.eye(4))) <= 1e-10
    with pytest.raises(NotOrthogonal):
        filter_povm(e0, PureState([SQ, SQ]))


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 5), n=st.integers(2, 6))
def test_additivity_and_range(seed, d, n):
    rng = np.random.default_rng(seed)
    m = random_povm(rng, d, n)
    rho = random_density(rng, d, rank=int(rng.integers(1, d + 1)))
    assign = rng.integers(0, 3, n)
    e1 = [lab for lab, k in zip(m.outcomes, assign) if k == 0]
    e2 = [lab for lab, k in zip(m.outcomes, assign) if k == 1]
    p1, p2, p12 = probability(rho, m, e1), probability(rho, m, e2), probability(rho, m, e1 + e2)
    assert abs(p12 - (p1 + p2)) <= 1e-12
    assert all(0.0 <= p <= 1.0 for p in (p1, p2, p12))


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 5), n=st.integers(1, 5))
def test_unconditional_posterior_is_probability_weighted_sum(seed, d, n):
    rng = np.random.default_rng(seed)
    ch = random_channel(rng, d, n)
    rho = random_density(rng, d)
    total = np.zeros((d, d), dtype=complex)
    for lab in ch.outcomes:
        try:
            p, s = posterior(rho, ch, lab)
        except ZeroProbabilityOutcome:
            continue
        total += p * s.matrix
    assert np.max(np.abs(unconditional_posterior(rho, ch).matrix - total)) <= 1e-12
