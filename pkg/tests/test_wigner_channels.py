from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from affinebody import InvalidLabel
from affinebody.quantum.channels import Channel2D, Channel3D
from affinebody.quantum.wigner import angular_momentum_matrices, as_half_integer

half_integers = st.integers(0, 8).map(lambda k: Fraction(k, 2))


@given(half_integers, st.floats(0.5, 2.0))
def test_commutation_relations(j, hbar):
    """[S_a, S_b] = i hbar eps_abc S_c and S^2 = hbar^2 j(j+1)."""
    S1, S2, S3 = angular_momentum_matrices(j, hbar)
    for A, B, C in ((S1, S2, S3), (S2, S3, S1), (S3, S1, S2)):
        assert np.allclose(A @ B - B @ A, 1j * hbar * C, atol=1e-12)
    am = angular_momentum_matrices(j, hbar)
    jj = float(j)
    assert np.allclose(am.casimir(), hbar ** 2 * jj * (jj + 1) * np.eye(am.dim), atol=1e-12)
    for S in am:
        assert np.allclose(S, S.conj().T)


def test_spin_half_is_half_pauli():
    S1, S2, S3 = angular_momentum_matrices("1/2")
    assert np.allclose(S1, 0.5 * np.array([[0, 1], [1, 0]]))
    assert np.allclose(S2, 0.5 * np.array([[0, -1j], [1j, 0]]))
    assert np.allclose(S3, 0.5 * np.diag([1, -1]))


def test_spin_one_raising_elements():
    """<1|S+|0> = <0|S+|-1> = sqrt(2)."""
    S1, S2, _ = angular_momentum_matrices(1)
    Splus = S1 + 1j * S2
    assert np.allclose(Splus, np.sqrt(2) * np.diag([1, 1], k=1))


@pytest.mark.parametrize("value,expected", [("1/2", Fraction(1, 2)), (0.5, Fraction(1, 2)), (2, Fraction(2)),
                                            (" 3/2 ", Fraction(3, 2))])
def test_half_integer_parsing(value, expected):
    assert as_half_integer(value) == expected


@pytest.mark.parametrize("value", [-1, "1/3", 0.25, "spin", None])
def test_half_integer_rejects(value):
    with pytest.raises(InvalidLabel):
        as_half_integer(value)


def test_channel3d_labels():
    ch = Channel3D("1/2", 3 / 2)
    assert ch.dims == (2, 4)
    assert str(ch) == "(1/2,3/2)"
    with pytest.raises(InvalidLabel):
        Channel3D("1/2", 1)


@given(st.integers(-5, 5), st.integers(-5, 5))
def test_channel2d_relabelings(m, n):
    ch = Channel2D(m, n)
    assert ch.m_hat == n - m and ch.n_hat == n + m
    assert ch.swapped().swapped() == ch
    assert ch.negated().n_hat == -ch.n_hat
    assert abs(ch.swapped().m_hat) == abs(ch.m_hat)


@pytest.mark.parametrize("bad", [0.5, "1", True])
def test_channel2d_rejects_non_integers(bad):
    with pytest.raises((InvalidLabel, ValueError, TypeError)):
        Channel2D(bad, 0)
