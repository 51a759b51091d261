"""Configuration geometry: deformation tensors, polar and two-polar forms.

A configuration is an orientation-preserving linear map ``phi`` from material
vectors to spatial vectors.  The spatial metric ``g`` and the material metric
``eta`` default to the identity.  Every function here accepts either a single
``(n, n)`` matrix or a stack ``(..., n, n)`` and works on the whole stack at
once, which keeps large randomized test sweeps cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from .errors import OrientationError, SingularConfiguration

#: relative singular-value floor below which a configuration counts as singular
SINGULAR_RTOL = 1e-14
#: invariants closer than this (times ``max|q| + 1``) are treated as coincident
DEGENERACY_TOL = 1e-9


def _t(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2)


def spd_power(M: np.ndarray, power: float) -> np.ndarray:
    """Real power of a symmetric positive-definite matrix via ``eigh``."""
    w, V = np.linalg.eigh(M)
    return (V * w[..., None, :] ** power) @ _t(V)


@dataclass(frozen=True, eq=False)
class MetricPair:
    """Spatial metric ``g`` and material metric ``eta`` (both SPD, constant)."""

    g: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        eta = np.asarray(self.eta, dtype=float)
        if g.shape != eta.shape or g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("metrics must be square matrices of equal size")
        for name, M in (("g", g), ("eta", eta)):
            if not np.allclose(M, M.T, atol=1e-13):
                raise ValueError(f"metric {name} is not symmetric")
            if np.linalg.eigvalsh(M).min() <= 0:
                raise ValueError(f"metric {name} is not positive definite")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "eta", eta)

    @classmethod
    def euclidean(cls, n: int) -> "MetricPair":
        return _euclidean_pair(int(n))

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def is_euclidean(self) -> bool:
        eye = np.eye(self.n)
        return bool(np.array_equal(self.g, eye) and np.array_equal(self.eta, eye))

    def to_euclidean(self, phi: np.ndarray) -> np.ndarray:
        """Congruence ``g^{1/2} phi eta^{-1/2}`` taking ``phi`` to the identity-metric chart."""
        if self.is_euclidean:
            return np.asarray(phi, dtype=float)
        return spd_power(self.g, 0.5) @ phi @ spd_power(self.eta, -0.5)

    def from_euclidean(self, phi_e: np.ndarray) -> np.ndarray:
        if self.is_euclidean:
            return np.asarray(phi_e, dtype=float)
        return spd_power(self.g, -0.5) @ phi_e @ spd_power(self.eta, 0.5)


@lru_cache(maxsize=None)
def _euclidean_pair(n: int) -> MetricPair:
    # shared instance: validation is not free and the pair is immutable
    g = np.eye(n)
    g.flags.writeable = False
    return MetricPair(g, g)


def _metrics_for(phi: np.ndarray, metrics: Optional[MetricPair]) -> MetricPair:
    n = phi.shape[-1]
    if metrics is None:
        return MetricPair.euclidean(n)
    if metrics.n != n:
        raise ValueError(f"metric dimension {metrics.n} does not match configuration dimension {n}")
    return metrics


def _as_config(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.ndim < 2 or phi.shape[-1] != phi.shape[-2]:
        raise ValueError(f"configuration must be square, got shape {phi.shape}")
    return phi


def check_nonsingular(phi: np.ndarray) -> None:
    s = np.linalg.svd(phi, compute_uv=False)
    bad = ~np.isfinite(s).all(axis=-1) | (s[..., -1] <= SINGULAR_RTOL * s[..., 0])
    if np.any(bad):
        raise SingularConfiguration("configuration matrix is singular to working precision")


def check_orientation(phi: np.ndarray) -> None:
    check_nonsingular(phi)
    if np.any(np.linalg.det(phi) <= 0):
        raise OrientationError("configuration must have positive determinant")


# ---------------------------------------------------------------------------
# deformation tensors
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DeformationTensors:
    G: np.ndarray       # Green tensor, material
    C: np.ndarray       # Cauchy tensor, spatial
    E_lag: np.ndarray   # (G - eta)/2
    e_eul: np.ndarray   # (g - C)/2


def green_cauchy(phi, metrics: Optional[MetricPair] = None) -> DeformationTensors:
    """Green ``G = phi^T g phi`` and Cauchy ``C = phi^{-T} eta phi^{-1}`` tensors.

    The Lagrange and Euler deformation tensors both vanish exactly when
    ``phi`` is an isometry of ``(eta, g)``.
    """
    phi = _as_config(phi)
    metrics = _metrics_for(phi, metrics)
    check_nonsingular(phi)
    inv = np.linalg.inv(phi)
    G = _t(phi) @ metrics.g @ phi
    C = _t(inv) @ metrics.eta @ inv
    return DeformationTensors(G=G, C=C, E_lag=0.5 * (G - metrics.eta), e_eul=0.5 * (metrics.g - C))


# ---------------------------------------------------------------------------
# polar decomposition  phi = U A
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PolarForm:
    """``phi = U A`` with ``U`` an isometry of ``(eta, g)`` and ``A`` eta-symmetric positive."""

    U: np.ndarray
    A: np.ndarray

    @property
    def B(self) -> np.ndarray:
        """Left stretch ``U A U^{-1}`` so that also ``phi = B U``."""
        return self.U @ self.A @ np.linalg.inv(self.U)

    def compose(self) -> np.ndarray:
        return self.U @ self.A


def polar_decompose(phi, metrics: Optional[MetricPair] = None) -> PolarForm:
    """Polar decomposition with ``A`` the principal square root of ``eta^{-1} G``.

    Computed through the SVD of the congruent Euclidean matrix, which is
    backward stable even for badly conditioned configurations.
    """
    phi = _as_config(phi)
    metrics = _metrics_for(phi, metrics)
    check_orientation(phi)
    W, s, Vt = np.linalg.svd(metrics.to_euclidean(phi))
    U_e = W @ Vt
    A_e = (_t(Vt) * s[..., None, :]) @ Vt
    if metrics.is_euclidean:
        return PolarForm(U=U_e, A=A_e)
    eh, ehi = spd_power(metrics.eta, 0.5), spd_power(metrics.eta, -0.5)
    return PolarForm(U=spd_power(metrics.g, -0.5) @ U_e @ eh, A=ehi @ A_e @ eh)


# ---------------------------------------------------------------------------
# two-polar decomposition  phi = L diag(exp q) R^{-1}
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TwoPolarForm:
    """Canonical two-polar form.

    ``q`` is ascending, ``L`` and ``R`` are rotations (orthonormal for the
    respective metric) and ``degenerate`` marks configurations whose
    invariants coincide, in which case ``L`` and ``R`` are not unique.
    """

    L: np.ndarray
    q: np.ndarray
    R: np.ndarray
    degenerate: np.ndarray | bool = False

    @property
    def Q(self) -> np.ndarray:
        return np.exp(self.q)

    def compose(self) -> np.ndarray:
        return (self.L * np.exp(self.q)[..., None, :]) @ np.linalg.inv(self.R)


def _canonical_svd(phi_e: np.ndarray):
    U, s, Vt = np.linalg.svd(phi_e)
    L = U[..., ::-1].copy()
    R = _t(Vt)[..., ::-1].copy()
    q = np.log(s[..., ::-1])
    # Flip matched column pairs so the first non-negligible entry of every
    # column of L is positive; this leaves L diag R^T unchanged.
    first = np.argmax(np.abs(L) > 1e-12, axis=-2)
    lead = np.take_along_axis(L, first[..., None, :], axis=-2)[..., 0, :]
    sign = np.where(lead < 0, -1.0, 1.0)
    L *= sign[..., None, :]
    R *= sign[..., None, :]
    # The last pair absorbs the determinant so both factors are rotations.
    flip = np.linalg.det(L) < 0
    L[..., -1] = np.where(flip[..., None], -L[..., -1], L[..., -1])
    R[..., -1] = np.where(flip[..., None], -R[..., -1], R[..., -1])
    return L, q, R


def _degenerate(q: np.ndarray) -> np.ndarray:
    if q.shape[-1] < 2:
        return np.zeros(q.shape[:-1], dtype=bool)
    tol = DEGENERACY_TOL * (np.max(np.abs(q), axis=-1) + 1.0)
    return np.min(np.diff(q, axis=-1), axis=-1) <= tol


def two_polar_decompose(phi, metrics: Optional[MetricPair] = None) -> TwoPolarForm:
    """Canonical two-polar decomposition.

    Coincident invariants do not raise: the form is still a valid
    factorization and ``degenerate`` is set.
    """
    phi = _as_config(phi)
    metrics = _metrics_for(phi, metrics)
    check_orientation(phi)
    L, q, R = _canonical_svd(metrics.to_euclidean(phi))
    degenerate = _degenerate(q)
    if not metrics.is_euclidean:
        L = spd_power(metrics.g, -0.5) @ L
        R = spd_power(metrics.eta, -0.5) @ R
    if degenerate.ndim == 0:
        degenerate = bool(degenerate)
    return TwoPolarForm(L=L, q=q, R=R, degenerate=degenerate)


def deformation_invariants(phi, metrics: Optional[MetricPair] = None) -> np.ndarray:
    """Logarithmic invariants ``q = ln(sqrt(eig(eta^{-1} G)))`` in ascending order.

    Evaluated as logarithms of singular values of the congruent Euclidean
    matrix, which equals the eigenvalue formula but keeps full relative
    accuracy on the small invariants.
    """
    phi = _as_config(phi)
    metrics = _metrics_for(phi, metrics)
    check_orientation(phi)
    s = np.linalg.svd(metrics.to_euclidean(phi), compute_uv=False)
    return np.log(s[..., ::-1])


def measure_weights(values, kind: str = "haar") -> np.ndarray:
    """Density of the invariant measure in two-polar coordinates.

    ``kind="haar"`` takes logarithmic invariants ``q`` and returns
    ``prod_{i<j} |sinh(q_i - q_j)|``; ``kind="lebesgue"`` takes ``Q = exp(q)``
    and returns ``prod_{i<j} |Q_i^2 - Q_j^2|``.  Works along the last axis.
    """
    v = np.asarray(values, dtype=float)
    n = v.shape[-1]
    out = np.ones(v.shape[:-1])
    for i in range(n):
        for j in range(i + 1, n):
            if kind == "haar":
                out = out * np.abs(np.sinh(v[..., i] - v[..., j]))
            elif kind == "lebesgue":
                out = out * np.abs(v[..., i] ** 2 - v[..., j] ** 2)
            else:
                raise ValueError(f"unknown measure kind {kind!r}")
    return out


class DilatationSplit(NamedTuple):
    qbar: np.ndarray
    relative: np.ndarray
    x: Optional[np.ndarray]  # q2 - q1, only for n = 2


def dilatation_split(q) -> DilatationSplit:
    """Split invariants into their mean and the traceless remainder."""
    q = np.asarray(q, dtype=float)
    qbar = q.mean(axis=-1)
    relative = q - qbar[..., None]
    x = q[..., 1] - q[..., 0] if q.shape[-1] == 2 else None
    return DilatationSplit(qbar, relative, x)


# ---------------------------------------------------------------------------
# small helpers used across the package
# ---------------------------------------------------------------------------

def rotation_2d(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


#: generator of planar rotations, d/dtheta rotation_2d(theta) at theta = 0
J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def random_gl_plus(rng: np.random.Generator, n: int, size: Optional[int] = None) -> np.ndarray:
    """Gaussian matrices with the first row flipped where needed to make det > 0."""
    shape = (n, n) if size is None else (size, n, n)
    M = rng.standard_normal(shape)
    neg = np.linalg.det(M) < 0
    M[..., 0, :] = np.where(neg[..., None], -M[..., 0, :], M[..., 0, :])
    return M


def random_rotation(rng: np.random.Generator, n: int, size: Optional[int] = None) -> np.ndarray:
    """Haar-distributed elements of SO(n) (QR of a Gaussian with sign fix)."""
    shape = (n, n) if size is None else (size, n, n)
    Q, Rm = np.linalg.qr(rng.standard_normal(shape))
    d = np.sign(np.diagonal(Rm, axis1=-2, axis2=-1))
    Q = Q * d[..., None, :]
    neg = np.linalg.det(Q) < 0
    Q[..., 0] = np.where(neg[..., None], -Q[..., 0], Q[..., 0])
    return Q
