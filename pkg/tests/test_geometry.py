import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from affinebody import (
    MetricPair,
    OrientationError,
    SingularConfiguration,
    deformation_invariants,
    dilatation_split,
    green_cauchy,
    measure_weights,
    polar_decompose,
    two_polar_decompose,
)
from affinebody.geometry import random_gl_plus, random_rotation, rotation_2d

import oracles
from strategies import finite, gl_plus, separated_gl_plus, spd


@given(st.sampled_from([2, 3]).flatmap(lambda n: st.tuples(gl_plus(n), spd(n), spd(n))))
def test_green_cauchy_matches_index_sums(data):
    """Green and Cauchy tensors agree with explicit index contractions."""
    phi, g, eta = data
    t = green_cauchy(phi, MetricPair(g, eta))
    G, C = oracles.green_cauchy_index(phi, g, eta)
    assert np.allclose(t.G, G, rtol=1e-9, atol=1e-9 * np.abs(G).max())
    assert np.allclose(t.C, C, rtol=1e-9, atol=1e-9 * np.abs(C).max())


@given(st.sampled_from([2, 3]).flatmap(lambda n: st.tuples(st.just(n), spd(n), spd(n), st.integers(0, 2 ** 31))))
def test_deformation_tensors_vanish_on_isometries(data):
    """E_lag and e_eul vanish exactly when phi maps eta-orthonormal frames to g-orthonormal frames."""
    n, g, eta, seed = data
    rot = random_rotation(np.random.default_rng(seed), n)
    metrics = MetricPair(g, eta)
    phi = metrics.from_euclidean(rot)
    t = green_cauchy(phi, metrics)
    assert np.allclose(t.E_lag, 0, atol=1e-10)
    assert np.allclose(t.e_eul, 0, atol=1e-10)


@given(st.sampled_from([2, 3]).flatmap(gl_plus))
def test_polar_matches_eigh_route(phi):
    """Polar factors equal those built from the eigendecomposition of phi^T phi."""
    pf = polar_decompose(phi)
    U, A = oracles.polar_by_eigh(phi)
    assert np.allclose(pf.A, A, atol=1e-8 * np.abs(A).max())
    assert np.allclose(pf.U, U, atol=1e-7)
    assert np.allclose(pf.compose(), phi, atol=1e-10 * np.abs(phi).max())
    assert np.allclose(pf.B @ pf.U, phi, atol=1e-9 * np.abs(phi).max())


@given(st.sampled_from([2, 3]).flatmap(lambda n: st.tuples(gl_plus(n), spd(n), spd(n))))
def test_polar_with_metrics(data):
    """U is an (eta, g) isometry and A is eta-symmetric positive."""
    phi, g, eta = data
    pf = polar_decompose(phi, MetricPair(g, eta))
    assert np.allclose(pf.U.T @ g @ pf.U, eta, atol=1e-8)
    etaA = eta @ pf.A
    assert np.allclose(etaA, etaA.T, atol=1e-8 * np.abs(etaA).max())
    assert np.linalg.eigvals(pf.A).real.min() > 0
    assert np.allclose(pf.compose(), phi, atol=1e-9 * np.abs(phi).max())


@given(st.sampled_from([2, 3]).flatmap(gl_plus))
def test_two_polar_reconstructs(phi):
    """L D R^{-1} rebuilds phi with rotations L, R and ascending invariants."""
    tp = two_polar_decompose(phi)
    n = phi.shape[0]
    assert np.allclose(tp.compose(), phi, atol=1e-10 * np.abs(phi).max())
    for M in (tp.L, tp.R):
        assert np.allclose(M.T @ M, np.eye(n), atol=1e-12)
        assert np.linalg.det(M) > 0
    assert np.all(np.diff(tp.q) >= 0)


@given(st.sampled_from([2, 3]).flatmap(lambda n: st.tuples(gl_plus(n), spd(n), spd(n))))
def test_invariants_match_generalized_eigenproblem(data):
    """q equals half the log of the eigenvalues of G x = lambda eta x."""
    phi, g, eta = data
    q = deformation_invariants(phi, MetricPair(g, eta))
    assert np.allclose(q, oracles.invariants_by_generalized_eig(phi, g, eta), atol=1e-8)


@given(st.sampled_from([2, 3]).flatmap(lambda n: st.tuples(gl_plus(n), st.integers(0, 2 ** 31))))
def test_invariants_are_isometry_invariant(data):
    """Rotating in space or in the body leaves the invariants unchanged."""
    phi, seed = data
    rng = np.random.default_rng(seed)
    n = phi.shape[0]
    L, R = random_rotation(rng, n), random_rotation(rng, n)
    assert np.allclose(deformation_invariants(L @ phi @ R), deformation_invariants(phi), atol=1e-10)


def test_two_polar_canonical_is_deterministic():
    """Repeated decompositions of the same matrix give bitwise-equal factors."""
    phi = random_gl_plus(np.random.default_rng(1), 3)
    a, b = two_polar_decompose(phi), two_polar_decompose(phi.copy())
    assert np.array_equal(a.L, b.L) and np.array_equal(a.R, b.R) and np.array_equal(a.q, b.q)


def test_two_polar_flags_coincident_invariants():
    """A rotation times a multiple of the identity has coincident invariants."""
    phi = 1.5 * rotation_2d(0.7)
    tp = two_polar_decompose(phi)
    assert tp.degenerate
    assert np.allclose(tp.compose(), phi)
    assert np.allclose(tp.q, np.log(1.5))


def test_known_invariants():
    """diag(e^0.5, e^-0.2) has invariants (-0.2, 0.5)."""
    assert np.allclose(deformation_invariants(np.diag([np.exp(0.5), np.exp(-0.2)])), [-0.2, 0.5])


def test_lebesgue_weight_known_value():
    """The Lebesgue density at Q = (1, 2, 3) is 3 * 5 * 8 = 120."""
    assert measure_weights([1.0, 2.0, 3.0], kind="lebesgue") == pytest.approx(120.0)


@given(st.sampled_from([2, 3]).flatmap(lambda n: st.lists(finite(-2, 2), min_size=n, max_size=n)))
def test_measure_weights_match_explicit_products(q):
    """Both densities equal the written-out pair products."""
    q = np.array(q)
    assert measure_weights(q, "haar") == pytest.approx(oracles.haar_weight_explicit(q), rel=1e-12, abs=1e-300)
    Q = np.exp(q)
    assert measure_weights(Q, "lebesgue") == pytest.approx(oracles.lebesgue_weight_explicit(Q), rel=1e-12, abs=1e-300)


def test_measure_weights_vectorized():
    rng = np.random.default_rng(0)
    q = rng.standard_normal((7, 3))
    stacked = measure_weights(q)
    assert np.allclose(stacked, [measure_weights(row) for row in q])
    with pytest.raises(ValueError):
        measure_weights(q, kind="flat")


@given(st.lists(finite(), min_size=3, max_size=3))
def test_dilatation_split(q):
    """The relative part is traceless and adding back qbar restores q."""
    s = dilatation_split(q)
    assert abs(s.relative.sum()) < 1e-12
    assert np.allclose(s.relative + s.qbar, q)
    assert s.x is None
    assert dilatation_split(q[:2]).x == pytest.approx(q[1] - q[0])


def test_stacked_decompositions():
    """Stacks of matrices decompose in one call."""
    phis = random_gl_plus(np.random.default_rng(2), 3, size=50)
    tp = two_polar_decompose(phis)
    assert np.allclose(tp.compose(), phis, atol=1e-10)
    assert np.allclose(polar_decompose(phis).compose(), phis, atol=1e-10)
    assert tp.degenerate.shape == (50,)


def test_orientation_and_singularity_errors():
    with pytest.raises(OrientationError):
        polar_decompose(np.diag([1.0, -1.0]))
    with pytest.raises(OrientationError):
        two_polar_decompose(np.diag([1.0, 1.0, -2.0]))
    with pytest.raises(SingularConfiguration):
        green_cauchy(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(ValueError):
        green_cauchy(np.ones((2, 3)))


def test_metric_pair_validation():
    with pytest.raises(ValueError):
        MetricPair(np.eye(2), np.eye(3))
    with pytest.raises(ValueError):
        MetricPair(np.array([[1.0, 2.0], [0.0, 1.0]]), np.eye(2))
    with pytest.raises(ValueError):
        MetricPair(-np.eye(2), np.eye(2))
    assert MetricPair.euclidean(3).is_euclidean
    assert MetricPair.euclidean(3) is MetricPair.euclidean(3)


@given(separated_gl_plus(3))
def test_congruence_roundtrip(phi):
    """to_euclidean and from_euclidean are inverse maps."""
    rng = np.random.default_rng(0)
    A = rng.standard_normal((3, 3))
    metrics = MetricPair(A @ A.T + np.eye(3), np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(metrics.from_euclidean(metrics.to_euclidean(phi)), phi, atol=1e-10 * np.abs(phi).max())
