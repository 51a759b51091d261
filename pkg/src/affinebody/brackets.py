"""Numerical Poisson brackets on the canonical phase space.

The bracket is ``{f, g} = sum_k (df/dQ_k dg/dP_k - df/dP_k dg/dQ_k)`` where
``(Q, P)`` are the two halves of :meth:`PhasePoint.to_vector`.  Gradients are
central finite differences with step ``rel_step * (1 + |z_k|)`` unless the
caller supplies them.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .errors import NumericalFailure
from .kinematics import PhasePoint

DEFAULT_REL_STEP = 1e-5

PhaseFunction = Callable[[PhasePoint], "float | np.ndarray"]


def jacobian(F: PhaseFunction, point: PhasePoint, rel_step: float = DEFAULT_REL_STEP) -> np.ndarray:
    """Central-difference Jacobian of ``F`` (scalar or array valued) in phase coordinates.

    Returns an array of shape ``(m, dim)`` where ``m`` is the flattened size
    of ``F``'s output.
    """
    n = point.n
    z0 = point.to_vector()
    rows = []
    for k in range(z0.size):
        h = rel_step * (1.0 + abs(z0[k]))
        zp = z0.copy()
        zm = z0.copy()
        zp[k] += h
        zm[k] -= h
        fp = np.ravel(np.asarray(F(PhasePoint.from_vector(zp, n)), dtype=float))
        fm = np.ravel(np.asarray(F(PhasePoint.from_vector(zm, n)), dtype=float))
        rows.append((fp - fm) / (2.0 * h))
    J = np.stack(rows, axis=1)
    if not np.all(np.isfinite(J)):
        raise NumericalFailure("non-finite finite-difference derivative")
    return J


def _symplectic_pair(JF: np.ndarray, JG: np.ndarray) -> np.ndarray:
    half = JF.shape[1] // 2
    return JF[:, :half] @ JG[:, half:].T - JF[:, half:] @ JG[:, :half].T


def poisson_bracket(
    f: PhaseFunction,
    g: PhaseFunction,
    point: PhasePoint,
    grad_f: Optional[np.ndarray] = None,
    grad_g: Optional[np.ndarray] = None,
    rel_step: float = DEFAULT_REL_STEP,
) -> float:
    """Bracket of two scalar phase-space functions at ``point``.

    ``grad_f`` / ``grad_g`` may be given as flat gradients in the
    :meth:`PhasePoint.to_vector` ordering to bypass finite differences.
    """
    JF = jacobian(f, point, rel_step) if grad_f is None else np.atleast_2d(np.asarray(grad_f, float))
    JG = jacobian(g, point, rel_step) if grad_g is None else np.atleast_2d(np.asarray(grad_g, float))
    value = _symplectic_pair(JF, JG)
    if not np.all(np.isfinite(value)):
        raise NumericalFailure("non-finite bracket value")
    return float(value[0, 0])


def bracket_matrix(
    F: PhaseFunction,
    G: PhaseFunction,
    point: PhasePoint,
    rel_step: float = DEFAULT_REL_STEP,
) -> np.ndarray:
    """All brackets ``{F_a, G_b}`` between components of two array-valued functions.

    The result has shape ``F.shape + G.shape``.
    """
    f0 = np.asarray(F(point))
    g0 = np.asarray(G(point))
    out = _symplectic_pair(jacobian(F, point, rel_step), jacobian(G, point, rel_step))
    return out.reshape(f0.shape + g0.shape)


def canonical_gradient_to_rhs(grad: np.ndarray) -> np.ndarray:
    """Hamiltonian vector field ``(dH/dP, -dH/dQ)`` from a flat gradient."""
    half = grad.size // 2
    return np.concatenate([grad[half:], -grad[:half]])
