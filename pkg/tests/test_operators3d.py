import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affinebody import InertiaModel, InvalidLabel, InvalidModel
from affinebody.geometry import measure_weights
from affinebody.quantum.operators3d import interior_axis, reduced_kinetic_3d

import oracles

CHANNELS = [(0, 0), ("1/2", "1/2"), (1, 1), ("1/2", "3/2")]
MODELS = [
    InertiaModel.affine_affine(3, 1.0, 0.2),
    InertiaModel.metric_affine(3, 2.0, 0.5, 0.1),
    InertiaModel.affine_metric(3, 2.0, -0.5, 0.3),
]
Q_AXIS = interior_axis(-2.0, 2.0, 9)
STRETCH_AXIS = interior_axis(0.1, 3.0, 9)


def _random_amplitude(op, rng):
    return rng.standard_normal(op.shape) + 1j * rng.standard_normal(op.shape)


@settings(max_examples=10)
@given(st.sampled_from(CHANNELS), st.sampled_from(range(len(MODELS))), st.integers(0, 2 ** 31))
def test_invariant_model_operators_are_hermitian(channel, k, seed):
    op = reduced_kinetic_3d(MODELS[k], *channel, Q_AXIS, potential=lambda a, b, c: a ** 2 + b ** 2 + c ** 2)
    rng = np.random.default_rng(seed)
    assert op.hermiticity_residual(_random_amplitude(op, rng), _random_amplitude(op, rng)) <= 1e-10


@pytest.mark.parametrize("channel", CHANNELS[:3], ids=str)
def test_dalembert_operators_are_hermitian(channel):
    op = reduced_kinetic_3d(InertiaModel.isotropic_dalembert(3, 1.5), *channel, STRETCH_AXIS)
    rng = np.random.default_rng(1)
    assert op.hermiticity_residual(_random_amplitude(op, rng), _random_amplitude(op, rng)) <= 1e-10


@pytest.mark.parametrize("channel", CHANNELS, ids=str)
def test_matrix_free_action_equals_assembled_matrix(channel):
    op = reduced_kinetic_3d(MODELS[1], *channel, Q_AXIS)
    F = _random_amplitude(op, np.random.default_rng(2))
    F = op.from_vector(op.to_vector(F))
    via_matrix = op.from_vector(op.matrix() @ op.to_vector(F))
    assert np.allclose(op.apply(F), via_matrix, atol=1e-10)


def test_symmetrized_matrix_is_hermitian():
    op = reduced_kinetic_3d(MODELS[0], 1, 1, Q_AXIS)
    H = op.symmetric_matrix().toarray()
    assert np.allclose(H, H.conj().T, atol=1e-10 * np.abs(H).max())


def test_scalar_channel_matches_loop_assembly():
    """The (0,0) channel against a node-by-node assembly of the scalar operator."""
    model = MODELS[0]
    V = lambda x1, x2, x3: 0.5 * (x1 + x2 + x3) ** 2 / 9
    op = reduced_kinetic_3d(model, 0, 0, Q_AXIS, potential=V)
    H = oracles.scalar_operator_3d(
        Q_AXIS, lambda x: measure_weights(x, "haar"), 0.5 / model.alpha, 0.5 * model.inv_beta, lambda x: V(*x))
    ref = np.linalg.eigvalsh(0.5 * (H + H.T))[:4]
    assert np.allclose(op.lowest(4), ref, rtol=1e-10, atol=1e-10)


def test_scalar_dalembert_channel_matches_loop_assembly():
    model = InertiaModel.isotropic_dalembert(3, 1.5)
    op = reduced_kinetic_3d(model, 0, 0, STRETCH_AXIS)
    H = oracles.scalar_operator_3d(
        STRETCH_AXIS, lambda x: measure_weights(x, "lebesgue"), 1 / (2 * 1.5), 0.0, lambda x: 0.0)
    ref = np.linalg.eigvalsh(0.5 * (H + H.T))[:4]
    assert np.allclose(op.lowest(4), ref, rtol=1e-10, atol=1e-10)


def test_mixed_model_shift_uses_the_matching_label():
    """Metric-affine shifts by s(s+1), affine-metric by j(j+1)."""
    ma = reduced_kinetic_3d(MODELS[1], "1/2", "3/2", Q_AXIS)
    am = reduced_kinetic_3d(MODELS[2], "1/2", "3/2", Q_AXIS)
    assert ma.shift == pytest.approx(0.5 * MODELS[1].inv_mu * 0.75)
    assert am.shift == pytest.approx(0.5 * MODELS[2].inv_mu * 3.75)


def test_chamber_mask():
    op = reduced_kinetic_3d(MODELS[0], 0, 0, Q_AXIS)
    X = np.meshgrid(Q_AXIS, Q_AXIS, Q_AXIS, indexing="ij")
    assert np.array_equal(op.mask, (X[0] < X[1]) & (X[1] < X[2]))
    assert op.n_active == 84  # 9 choose 3


def test_argument_checks():
    with pytest.raises(InvalidLabel):
        reduced_kinetic_3d(MODELS[0], "1/2", 1, Q_AXIS)
    with pytest.raises(InvalidModel):
        reduced_kinetic_3d(InertiaModel.affine_affine(2, 1.0), 0, 0, Q_AXIS)
    with pytest.raises(InvalidModel):
        reduced_kinetic_3d(InertiaModel.dalembert(np.diag([1.0, 2.0, 3.0])), 0, 0, STRETCH_AXIS)
    with pytest.raises(ValueError):
        reduced_kinetic_3d(MODELS[0], 0, 0, np.array([0.0, 0.1, 0.3, 0.4]))
    with pytest.raises(ValueError):
        reduced_kinetic_3d(InertiaModel.isotropic_dalembert(3, 1.0), 0, 0, Q_AXIS)
    op = reduced_kinetic_3d(MODELS[0], 0, 0, Q_AXIS)
    with pytest.raises(ValueError):
        op.apply(np.zeros((3, 3, 3, 1, 1)))
