import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affinebody import InertiaModel, InvalidModel, ShapeError
from affinebody.quantum.inner import weighted_inner_product
from affinebody.quantum.planar import (
    bound_state_count,
    channel_shift,
    dalembert_polar_solver,
    dalembert_qpm_solver,
    peter_weyl_reduce_2d,
    qpm_total_levels,
    reduced_kinetic_2d,
    synthesize_2d,
)

import oracles

GEODETIC = InertiaModel.affine_affine(2, 1.0, 0.0)

# Exact levels of the geodetic shear channel for A = hbar = 1, from the
# Poschl-Teller reduction; threshold 1/4.
FROZEN_LEVELS = {
    (4, 4): [-2.0, 0.0],
    (3, 3): [-0.75],
    (4, 3): [-0.75],
    (4, 2): [0.0],
    (3, 2): [0.0],
    (2, 2): [0.0],
    (2, 1): [],
    (1, 1): [],
    (1, -1): [],
    (0, 0): [],
}


@pytest.mark.parametrize("channel", sorted(FROZEN_LEVELS), ids=str)
def test_frozen_shear_levels(channel):
    """Binding energies below the continuum match the exact levels to 1e-3."""
    res = bound_state_count(GEODETIC, *channel)
    exact = np.array(FROZEN_LEVELS[channel])
    assert res.count == exact.size
    assert res.threshold == pytest.approx(0.25)
    if exact.size:
        rel = np.abs((res.threshold - res.energies) - (0.25 - exact)) / (0.25 - exact)
        assert np.all(rel <= 1e-3)


def test_frozen_levels_match_independent_formula():
    for (m, n), levels in FROZEN_LEVELS.items():
        assert np.allclose(oracles.hyperbolic_shear_levels(m, n), levels)


@settings(max_examples=15)
@given(st.integers(-4, 4), st.integers(-4, 4))
def test_swap_and_negation_symmetry(m, n):
    """(m, n), (n, m) and (-m, -n) carry the same shear spectrum."""
    base = bound_state_count(GEODETIC, m, n).energies
    assert np.allclose(bound_state_count(GEODETIC, n, m).energies, base, atol=1e-8)
    assert np.allclose(bound_state_count(GEODETIC, -m, -n).energies, base, atol=1e-8)


@pytest.mark.parametrize("kind", ["MetricAffine", "AffineMetric"])
def test_mixed_models_shift_the_affine_spectrum(kind):
    """A mixed model is the affine-affine channel with alpha = I + A plus half inv_mu hbar^2 times a label squared."""
    mixed = InertiaModel(kind=kind, n=2, I=2.0, A=0.5, B=0.1)
    plain = InertiaModel.affine_affine(2, mixed.alpha, 0.1)
    m, n = 3, 4
    shift = 0.5 * mixed.inv_mu * (m if kind == "MetricAffine" else n) ** 2
    assert channel_shift(mixed, m, n) == pytest.approx(shift)
    a = bound_state_count(mixed, m, n)
    b = bound_state_count(plain, m, n)
    assert np.allclose(a.energies, b.energies + shift, atol=1e-10)
    assert a.threshold == pytest.approx(b.threshold + shift)


def test_reduction_rejects_unsupported_models():
    with pytest.raises(InvalidModel):
        reduced_kinetic_2d(InertiaModel.isotropic_dalembert(2, 1.0), 1, 1)
    with pytest.raises(InvalidModel):
        reduced_kinetic_2d(InertiaModel.affine_affine(3, 1.0), 1, 1)


def test_dilatation_operator_is_a_free_particle_of_mass_two():
    """With A = 1, B = 0 the dilatation coefficient is 1/4."""
    _, dil = reduced_kinetic_2d(GEODETIC, 0, 0)
    assert dil.coefficient == pytest.approx(0.25)


def test_qpm_channels_match_radial_oscillator():
    """Each Q+- channel is a planar radial oscillator with index sqrt((m -+ n)^2/4 + 2 I a)."""
    a, b, c, I = 1.0, 0.5, 1.0, 1.0
    m, n = 2, 1
    sp, sm = dalembert_qpm_solver(m, n, lambda Q: a / Q ** 2 + c * Q ** 2, lambda Q: b / Q ** 2 + c * Q ** 2, I=I)
    ref_p = oracles.planar_radial_spectrum(I, (m - n) ** 2 / 4, a, c, 5)
    ref_m = oracles.planar_radial_spectrum(I, (m + n) ** 2 / 4, b, c, 5)
    assert np.all(np.abs(sp.eigenvalues[:5] - ref_p) / ref_p < 1e-3)
    assert np.all(np.abs(sm.eigenvalues[:5] - ref_m) / ref_m < 1e-3)


def test_polar_chart_agrees_with_qpm_chart():
    a, b, c = 1.0, 0.5, 1.0
    m, n = 1, 1
    sp, sm = dalembert_qpm_solver(m, n, lambda Q: a / Q ** 2 + c * Q ** 2, lambda Q: b / Q ** 2 + c * Q ** 2)
    total = qpm_total_levels(sp, sm, 5).eigenvalues
    polar = dalembert_polar_solver(m, n, lambda r: c * r ** 2,
                                   lambda p: a / np.cos(p) ** 2 + b / np.sin(p) ** 2).eigenvalues
    assert np.all(np.abs(polar - total) / total < 1e-3)


@given(st.integers(0, 2 ** 31), st.sampled_from([(4, 6), (5, 5), (8, 3)]))
def test_fourier_reduction_roundtrip(seed, dims):
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal(dims + (7,)) + 1j * rng.standard_normal(dims + (7,))
    channels = peter_weyl_reduce_2d(samples)
    assert np.allclose(synthesize_2d(channels, *dims), samples)


@given(st.integers(0, 2 ** 31))
def test_real_functions_have_conjugate_channels(seed):
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((6, 6, 4))
    ch = peter_weyl_reduce_2d(samples)
    for (m, n), f in ch.items():
        if (-m, -n) in ch:
            assert np.allclose(ch[(-m, -n)], np.conj(f))


def test_single_channel_is_recovered():
    N = 8
    alpha = 2 * np.pi * np.arange(N) / N
    A, B = np.meshgrid(alpha, alpha, indexing="ij")
    f = np.array([1.0, -2.0, 0.5])
    samples = np.exp(1j * (2 * A - B))[..., None] * f
    ch = peter_weyl_reduce_2d(samples, tol=1e-12)
    assert list(ch) == [(2, -1)]
    assert np.allclose(ch[(2, -1)], f)
    with pytest.raises(ValueError):
        synthesize_2d({(5, 0): f}, N, N)


def test_inner_product_of_scalar_channels():
    """Trapezoid quadrature of conj(f1) f2 x on [0, 1] is exact for these polynomials."""
    x = np.linspace(0, 1, 101)
    val = weighted_inner_product(np.ones_like(x), x, x, x[1] - x[0])
    assert val.real == pytest.approx(1 / 3, abs=1e-4)


@given(st.integers(0, 2 ** 31))
def test_inner_product_is_hermitian_and_positive(seed):
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.1, 2.0, (9, 7))
    f1 = rng.standard_normal((9, 7, 2, 3)) + 1j * rng.standard_normal((9, 7, 2, 3))
    f2 = rng.standard_normal((9, 7, 2, 3)) + 1j * rng.standard_normal((9, 7, 2, 3))
    a = weighted_inner_product(f1, f2, w, (0.1, 0.2))
    b = weighted_inner_product(f2, f1, w, (0.1, 0.2))
    assert a == pytest.approx(np.conj(b))
    assert weighted_inner_product(f1, f1, w, 0.1).real > 0
    maps = weighted_inner_product({(0, 0): f1, (1, 1): f2}, {(0, 0): f1, (1, 1): f2}, w, 0.1)
    assert maps == pytest.approx(weighted_inner_product(f1, f1, w, 0.1) + weighted_inner_product(f2, f2, w, 0.1))


def test_inner_product_shape_errors():
    w = np.ones(5)
    with pytest.raises(ShapeError):
        weighted_inner_product(np.ones(5), np.ones(4), w, 1.0)
    with pytest.raises(ShapeError):
        weighted_inner_product(np.ones((5, 2)), np.ones((5, 2)), w, 1.0)
    with pytest.raises(ShapeError):
        weighted_inner_product({(0, 0): np.ones(5)}, {(1, 0): np.ones(5)}, w, 1.0)
    with pytest.raises(ShapeError):
        weighted_inner_product({(0, 0): np.ones(5)}, np.ones(5), w, 1.0)
