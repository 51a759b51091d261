import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affinebody import PhasePoint, bracket_matrix, poisson_bracket
from affinebody.brackets import canonical_gradient_to_rhs, jacobian

import oracles
from strategies import phase_points


def Sigma(pt):
    return pt.phi @ pt.P


def SigmaHat(pt):
    return pt.P @ pt.phi


def Lambda(pt):
    return np.outer(pt.x, pt.p)


def J(pt):
    return Lambda(pt) + Sigma(pt)


def p(pt):
    return pt.p


def p_hat(pt):
    return pt.p @ pt.phi


def _close(a, b, scale):
    return np.max(np.abs(a - b)) <= 1e-6 * max(1.0, scale)


@settings(max_examples=10)
@given(st.sampled_from([2, 3]).flatmap(phase_points))
def test_spin_algebras(point):
    """Both affine spins and the total generator close on gl(n)."""
    S, SH = Sigma(point), SigmaHat(point)
    scale = np.abs(point.to_vector()).max() ** 2
    assert _close(bracket_matrix(Sigma, Sigma, point), oracles.bracket_sigma_sigma(S), scale)
    assert _close(bracket_matrix(SigmaHat, SigmaHat, point), oracles.bracket_hat_hat(SH), scale)
    assert _close(bracket_matrix(J, J, point), oracles.bracket_sigma_sigma(J(point)), scale)
    assert _close(bracket_matrix(Lambda, Lambda, point), oracles.bracket_sigma_sigma(Lambda(point)), scale)


@settings(max_examples=10)
@given(st.sampled_from([2, 3]).flatmap(phase_points))
def test_left_and_right_actions_commute(point):
    scale = np.abs(point.to_vector()).max() ** 2
    assert _close(bracket_matrix(Sigma, SigmaHat, point), 0.0, scale)


@settings(max_examples=10)
@given(st.sampled_from([2, 3]).flatmap(phase_points))
def test_generators_act_on_linear_momentum(point):
    ref = oracles.bracket_generator_momentum(point.p)
    scale = np.abs(point.to_vector()).max()
    assert _close(bracket_matrix(J, p, point), ref, scale)
    assert _close(bracket_matrix(Lambda, p, point), ref, scale)


@settings(max_examples=10)
@given(st.sampled_from([2, 3]).flatmap(phase_points))
def test_comoving_spin_on_comoving_momentum(point):
    """{SigmaHat^A_B, p^_C} = -d^A_C p^_B (derived from the canonical bracket)."""
    ph = p_hat(point)
    got = bracket_matrix(SigmaHat, p_hat, point)
    scale = np.abs(point.to_vector()).max() ** 2
    assert _close(got, -oracles.bracket_hat_momentum_plus(ph), scale)


def test_canonical_pairs():
    """{x_i, p_j} = d_ij and {phi^i_A, P^B_j} = d^i_j d^B_A."""
    point = PhasePoint(np.array([0.3, -1.0]), np.array([[1.2, 0.1], [-0.4, 0.9]]), np.array([0.5, 2.0]),
                       np.array([[0.1, 0.2], [0.3, 0.4]]))
    assert np.allclose(bracket_matrix(lambda s: s.x, p, point), np.eye(2), atol=1e-9)
    got = bracket_matrix(lambda s: s.phi, lambda s: s.P, point)
    ref = np.einsum("ij,BA->iABj", np.eye(2), np.eye(2))
    assert np.allclose(got, ref, atol=1e-9)


@given(st.sampled_from([2, 3]).flatmap(phase_points))
def test_bracket_is_antisymmetric(point):
    f = lambda s: float(np.trace(Sigma(s) @ Sigma(s)) + s.x @ s.p)
    g = lambda s: float(np.sum(s.phi ** 2) + s.P[0, 0] * s.x[0])
    assert poisson_bracket(f, g, point) == pytest.approx(-poisson_bracket(g, f, point), abs=1e-8)


@settings(max_examples=10)
@given(st.sampled_from([2, 3]).flatmap(phase_points))
def test_jacobi_identity_on_spin_components(point):
    """{S01, {S10, S11}} + cyclic = 0 for three affine-spin components."""
    a = lambda s: Sigma(s)[0, 1]
    b = lambda s: Sigma(s)[1, 0]
    c = lambda s: SigmaHat(s)[1, 1] + Sigma(s)[1, 1]

    def br(f, g):
        return lambda s: poisson_bracket(f, g, s, rel_step=1e-4)

    total = poisson_bracket(a, br(b, c), point, rel_step=1e-4)
    total += poisson_bracket(b, br(c, a), point, rel_step=1e-4)
    total += poisson_bracket(c, br(a, b), point, rel_step=1e-4)
    assert abs(total) < 1e-4 * max(1.0, np.abs(point.to_vector()).max() ** 2)


def test_supplied_gradients_bypass_differencing():
    point = PhasePoint.internal(np.eye(2), np.zeros((2, 2)))
    gf = np.zeros(12)
    gg = np.zeros(12)
    gf[0] = 1.0   # d/dx_0
    gg[6] = 1.0   # d/dp_0
    assert poisson_bracket(None, None, point, grad_f=gf, grad_g=gg) == 1.0


def test_hamiltonian_vector_field_of_a_free_particle():
    """H = |p|^2/2 gives xdot = p and pdot = 0."""
    point = PhasePoint(np.array([1.0, 2.0]), np.eye(2), np.array([0.3, -0.7]), np.zeros((2, 2)))
    grad = jacobian(lambda s: 0.5 * s.p @ s.p, point)[0]
    rhs = canonical_gradient_to_rhs(grad)
    assert np.allclose(rhs[:2], point.p)
    assert np.allclose(rhs[6:], 0.0)
