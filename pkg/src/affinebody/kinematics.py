"""Velocities, canonical momenta and the momentum maps of the linear group.

Conventions
-----------
* ``phi[i, A]``: spatial index ``i``, material index ``A``.
* ``P[A, i]``: canonical momentum conjugate to ``phi[i, A]`` so that the
  pairing with a velocity is ``Tr(P phidot)``.
* ``Sigma = phi P`` (spatial affine spin) and ``SigmaHat = P phi``
  (co-moving affine spin) generate left and right multiplication of ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateFlag, OrientationError
from .geometry import (
    MetricPair,
    TwoPolarForm,
    check_nonsingular,
    two_polar_decompose,
)


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """Point of the canonical phase space of an affinely rigid body."""

    x: np.ndarray
    phi: np.ndarray
    p: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        n = phi.shape[0]
        x = np.asarray(self.x, dtype=float).reshape(n)
        p = np.asarray(self.p, dtype=float).reshape(n)
        P = np.asarray(self.P, dtype=float).reshape(n, n)
        for name, arr in (("x", x), ("phi", phi), ("p", p), ("P", P)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite entries in {name}")
        if np.linalg.det(phi) <= 0:
            raise OrientationError("configuration must have positive determinant")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "P", P)

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    @classmethod
    def internal(cls, phi, P) -> "PhasePoint":
        """Point with the translational sector at rest at the origin."""
        phi = np.asarray(phi, dtype=float)
        n = phi.shape[0]
        return cls(np.zeros(n), phi, np.zeros(n), P)

    def to_vector(self) -> np.ndarray:
        """Flatten as ``(coordinates, momenta)`` with matching conjugate order.

        Coordinate ``k`` of the first half is conjugate to entry ``k`` of the
        second half: ``x_i <-> p_i`` and ``phi[i, A] <-> P[A, i]``.
        """
        return np.concatenate([self.x, self.phi.ravel(), self.p, self.P.T.ravel()])

    @classmethod
    def from_vector(cls, z: np.ndarray, n: int) -> "PhasePoint":
        x, phi, p, P = split_vector(z, n)
        return cls(x, phi, p, P)


def split_vector(z: np.ndarray, n: int):
    """Views ``(x, phi, p, P)`` into a flattened phase vector (no validation)."""
    k = n + n * n
    x = z[:n]
    phi = z[n:k].reshape(n, n)
    p = z[k:k + n]
    P = z[k + n:].reshape(n, n).T
    return x, phi, p, P


def join_vector(x, phi, p, P) -> np.ndarray:
    return np.concatenate([np.ravel(x), np.ravel(phi), np.ravel(p), np.asarray(P).T.ravel()])


# ---------------------------------------------------------------------------
# velocities
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AffineVelocity:
    Omega: np.ndarray     # phidot phi^{-1}
    OmegaHat: np.ndarray  # phi^{-1} phidot


def affine_velocity(phi, phidot) -> AffineVelocity:
    phi = np.asarray(phi, dtype=float)
    phidot = np.asarray(phidot, dtype=float)
    check_nonsingular(phi)
    inv = np.linalg.inv(phi)
    return AffineVelocity(Omega=phidot @ inv, OmegaHat=inv @ phidot)


# ---------------------------------------------------------------------------
# affine spin, spin and vorticity
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpinVorticity:
    Sigma: np.ndarray
    SigmaHat: np.ndarray
    S: np.ndarray   # Sigma - g^{-1} Sigma^T g
    V: np.ndarray   # SigmaHat - eta^{-1} SigmaHat^T eta
    p: float        # Tr Sigma = Tr SigmaHat, the dilatational momentum


def spin_vorticity(point: PhasePoint, metrics: Optional[MetricPair] = None) -> SpinVorticity:
    check_nonsingular(point.phi)
    Sigma = point.phi @ point.P
    SigmaHat = point.P @ point.phi
    if metrics is None or metrics.is_euclidean:
        S = Sigma - Sigma.T
        V = SigmaHat - SigmaHat.T
    else:
        S = Sigma - np.linalg.solve(metrics.g, Sigma.T @ metrics.g)
        V = SigmaHat - np.linalg.solve(metrics.eta, SigmaHat.T @ metrics.eta)
    return SpinVorticity(Sigma, SigmaHat, S, V, float(np.trace(Sigma)))


def trace_split(Sigma):
    """Deviator ``Sigma - (Tr Sigma / n) I`` and trace ``p``."""
    Sigma = np.asarray(Sigma, dtype=float)
    n = Sigma.shape[-1]
    p = np.trace(Sigma, axis1=-2, axis2=-1)
    sigma = Sigma - (p / n)[..., None, None] * np.eye(n)
    return sigma, p


def casimir(SigmaHat, k: int) -> float:
    """Casimir invariant ``Tr(SigmaHat^k)`` (equal to ``Tr(Sigma^k)``)."""
    if int(k) != k or k < 1:
        raise ValueError("Casimir order must be a positive integer")
    return float(np.trace(np.linalg.matrix_power(np.asarray(SigmaHat, dtype=float), int(k))))


def skew_norm2(W) -> float:
    """``-(1/2) Tr(W^2)``, the squared magnitude of a skew generator."""
    W = np.asarray(W, dtype=float)
    return float(-0.5 * np.trace(W @ W))


# ---------------------------------------------------------------------------
# two-polar momenta
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TwoPolarMomenta:
    """Momenta conjugate to the two-polar chart ``(L, q, R)``.

    ``rhoHat`` pairs with ``L^T dL``, ``tauHat`` with ``R^T dR`` and ``p_a``
    with ``dq^a``.  ``M`` and ``N`` are the combinations that make the
    kinetic energy diagonal.
    """

    rhoHat: np.ndarray
    tauHat: np.ndarray
    p_a: np.ndarray
    M: np.ndarray
    N: np.ndarray
    degenerate: bool = False


def two_polar_momenta(
    point: PhasePoint,
    tp: Optional[TwoPolarForm] = None,
    *,
    allow_degenerate: bool = False,
) -> TwoPolarMomenta:
    """Express the co-moving affine spin in two-polar momenta.

    With ``K = R^T SigmaHat R`` and ``D = diag(exp q)`` the pairing
    ``Tr(SigmaHat OmegaHat)`` written in chart rates gives (chain rule)::

        p_a    = K_aa
        rhoHat = X - X^T,  X = D K D^{-1}    (equals L^T S L)
        tauHat = -(K - K^T)                   (equals -R^T V R)

    Identity metrics are assumed; reduce other metrics by congruence first.
    """
    if tp is None:
        tp = two_polar_decompose(point.phi)
    SigmaHat = point.P @ point.phi
    K = tp.R.T @ SigmaHat @ tp.R
    Q = np.exp(tp.q)
    X = (Q[:, None] / Q[None, :]) * K
    rhoHat = X - X.T
    tauHat = -(K - K.T)
    result = TwoPolarMomenta(
        rhoHat=rhoHat,
        tauHat=tauHat,
        p_a=np.diag(K).copy(),
        M=-rhoHat - tauHat,
        N=rhoHat - tauHat,
        degenerate=bool(tp.degenerate),
    )
    if tp.degenerate and not allow_degenerate:
        raise DegenerateFlag("coincident deformation invariants: off-diagonal momenta are not unique", result)
    return result


def sigma_hat_from_two_polar(tp: TwoPolarForm, p_a, rhoHat, tauHat) -> np.ndarray:
    """Inverse of :func:`two_polar_momenta`: rebuild ``SigmaHat``.

    For each pair ``a < b`` the entries ``u = K_ab`` and ``v = K_ba`` solve
    ``tau_ab = v - u`` and ``rho_ab = E u - v / E`` with ``E = Q_a / Q_b``.
    """
    Q = np.exp(tp.q)
    n = Q.size
    rhoHat = np.asarray(rhoHat, dtype=float)
    tauHat = np.asarray(tauHat, dtype=float)
    K = np.diag(np.asarray(p_a, dtype=float))
    for a in range(n):
        for b in range(a + 1, n):
            E = Q[a] / Q[b]
            if abs(E - 1.0 / E) < 1e-12:
                raise DegenerateFlag("coincident invariants: off-diagonal momenta cannot be inverted")
            u = (rhoHat[a, b] + tauHat[a, b] / E) / (E - 1.0 / E)
            K[a, b] = u
            K[b, a] = u + tauHat[a, b]
    return tp.R @ K @ tp.R.T


def casimir2_two_polar(tpm: TwoPolarMomenta, q) -> float:
    """Second Casimir from two-polar momenta (sums over ordered pairs)."""
    q = np.asarray(q, dtype=float)
    d = 0.5 * (q[:, None] - q[None, :])
    off = ~np.eye(q.size, dtype=bool)
    sh2 = np.sinh(d[off]) ** 2
    ch2 = np.cosh(d[off]) ** 2
    return float(
        np.sum(tpm.p_a ** 2)
        + np.sum(tpm.M[off] ** 2 / sh2) / 16.0
        - np.sum(tpm.N[off] ** 2 / ch2) / 16.0
    )


def sl_casimir_two_polar(tpm: TwoPolarMomenta, q) -> float:
    """``Tr(sigmaHat^2)`` for the deviatoric part, in two-polar momenta."""
    q = np.asarray(q, dtype=float)
    n = q.size
    d = 0.5 * (q[:, None] - q[None, :])
    off = ~np.eye(n, dtype=bool)
    dp = tpm.p_a[:, None] - tpm.p_a[None, :]
    return float(
        np.sum(dp ** 2) / (2 * n)
        + np.sum(tpm.M[off] ** 2 / np.sinh(d[off]) ** 2) / 16.0
        - np.sum(tpm.N[off] ** 2 / np.cosh(d[off]) ** 2) / 16.0
    )


def planar_angular_momenta(point: PhasePoint) -> tuple[float, float]:
    """``(p_alpha, p_beta)`` for n = 2: spin and vorticity magnitudes with sign.

    ``p_alpha = S[0, 1]`` and ``p_beta = V[0, 1]``, equivalently
    ``(1/2) Tr(S J2)`` and ``(1/2) Tr(V J2)`` with ``J2`` the rotation generator.
    """
    if point.n != 2:
        raise ValueError("planar angular momenta need n = 2")
    sv = spin_vorticity(point)
    return float(sv.S[0, 1]), float(sv.V[0, 1])


def planar_phase_point(
    alpha: float,
    q: tuple[float, float],
    beta: float,
    p_a: tuple[float, float],
    p_alpha: float,
    p_beta: float,
) -> PhasePoint:
    """Internal phase point of a planar body from two-polar data.

    The spin is ``p_alpha [[0, 1], [-1, 0]]`` and the vorticity
    ``p_beta [[0, 1], [-1, 0]]``.
    """
    from .geometry import rotation_2d

    L = rotation_2d(alpha)
    R = rotation_2d(beta)
    q = np.asarray(q, dtype=float)
    if q[0] > q[1]:
        raise ValueError("invariants must be ascending")
    tp = TwoPolarForm(L=L, q=q, R=R, degenerate=False)
    unit = np.array([[0.0, 1.0], [-1.0, 0.0]])
    SigmaHat = sigma_hat_from_two_polar(tp, p_a, p_alpha * unit, -p_beta * unit)
    phi = tp.compose()
    return PhasePoint.internal(phi, SigmaHat @ np.linalg.inv(phi))
