"""Inertia models: kinetic energies, kinetic Hamiltonians and Legendre maps.

Four models are supported.

``DAlembert``
    Kinetic energy inherited from a cloud of particles, with inertial tensor
    ``J``: ``T = (m/2)|v|^2 + (1/2) Tr(g phidot J phidot^T)``.
``AffineAffine``
    Invariant under spatial and material affine maps (internal part only):
    ``T = (A/2) Tr(OmegaHat^2) + (B/2) (Tr OmegaHat)^2``.
``AffineMetric``
    Affine in space, metric in the body; adds ``(I/2) Tr(OmegaHat^T eta OmegaHat eta^{-1})``.
``MetricAffine``
    Metric in space, affine in the body; the same with spatial ``Omega`` and ``g``.

Each energy and Hamiltonian can be evaluated through several algebraically
equivalent formulas (``form=...``) so they can cross-check one another.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateLegendre, InvalidModel
from .geometry import MetricPair, check_nonsingular, two_polar_decompose
from .kinematics import skew_norm2, two_polar_momenta, PhasePoint

KINDS = ("DAlembert", "AffineAffine", "AffineMetric", "MetricAffine")


@dataclass(frozen=True, eq=False)
class InertiaModel:
    kind: str
    n: int
    m: float = 1.0
    J: Optional[np.ndarray] = None
    I: float = 0.0
    A: float = 0.0
    B: float = 0.0
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidModel(f"unknown model kind {self.kind!r}; expected one of {KINDS}")
        if self.J is not None:
            object.__setattr__(self, "J", np.asarray(self.J, dtype=float))
        if self.validate:
            self.check()

    # -- constructors --------------------------------------------------------
    @classmethod
    def dalembert(cls, J, m: float = 1.0) -> "InertiaModel":
        J = np.asarray(J, dtype=float)
        return cls("DAlembert", J.shape[0], m=m, J=J)

    @classmethod
    def isotropic_dalembert(cls, n: int, I: float, m: float = 1.0) -> "InertiaModel":
        return cls("DAlembert", n, m=m, J=I * np.eye(n))

    @classmethod
    def affine_affine(cls, n: int, A: float, B: float = 0.0) -> "InertiaModel":
        return cls("AffineAffine", n, A=A, B=B)

    @classmethod
    def affine_metric(cls, n: int, I: float, A: float, B: float = 0.0, m: float = 1.0) -> "InertiaModel":
        return cls("AffineMetric", n, m=m, I=I, A=A, B=B)

    @classmethod
    def metric_affine(cls, n: int, I: float, A: float, B: float = 0.0, m: float = 1.0) -> "InertiaModel":
        return cls("MetricAffine", n, m=m, I=I, A=A, B=B)

    # -- checks ---------------------------------------------------------------
    def check(self) -> None:
        n = self.n
        if self.kind == "DAlembert":
            if self.m <= 0:
                raise InvalidModel("mass must be positive")
            if self.J is None or self.J.shape != (n, n):
                raise InvalidModel("d'Alembert model needs an n x n inertial tensor J")
            if not np.allclose(self.J, self.J.T) or np.linalg.eigvalsh(self.J).min() <= 0:
                raise InvalidModel("inertial tensor J must be symmetric positive definite")
            return
        if self.kind == "AffineAffine":
            if self.A == 0:
                raise InvalidModel("affine-affine model needs A != 0")
            if self.A + n * self.B == 0:
                raise InvalidModel("degenerate metric: A + n B = 0")
            return
        if self.m <= 0:
            raise InvalidModel("mass must be positive")
        if self.I + self.A == 0:
            raise InvalidModel("degenerate metric: I + A = 0")
        if self.I ** 2 == self.A ** 2:
            raise InvalidModel("degenerate metric: I^2 = A^2")
        if self.I + self.A + n * self.B == 0:
            raise InvalidModel("degenerate metric: I + A + n B = 0")

    @property
    def positive_definite(self) -> bool:
        """Whether the kinetic metric is Riemannian.

        Splitting a velocity into symmetric-traceless, skew and trace parts
        gives the coefficients ``I + A``, ``I - A`` and ``I + A + n B``
        (with ``I = 0`` for the affine-affine model, which is never definite).
        """
        if self.kind == "DAlembert":
            return True
        I = self.I if self.kind != "AffineAffine" else 0.0
        return bool(I + self.A > 0 and I - self.A > 0 and I + self.A + self.n * self.B > 0)

    # -- inverse-metric coefficients -----------------------------------------
    @property
    def alpha(self) -> float:
        """Coefficient ``I + A`` of the quadratic Casimir (``A`` for affine-affine)."""
        return self.A if self.kind == "AffineAffine" else self.I + self.A

    @property
    def inv_alpha(self) -> float:
        return 1.0 / self.alpha

    @property
    def inv_beta(self) -> float:
        """Reciprocal of ``beta = -(I+A)(I+A+nB)/B``; zero when ``B = 0``."""
        a = self.alpha
        return -self.B / (a * (a + self.n * self.B))

    @property
    def inv_mu(self) -> float:
        """Reciprocal of ``mu = (I^2 - A^2)/I``; zero for the affine-affine model."""
        if self.kind == "AffineAffine":
            return 0.0
        return self.I / (self.I ** 2 - self.A ** 2)

    @property
    def is_isotropic_dalembert(self) -> bool:
        return self.kind == "DAlembert" and np.allclose(self.J, self.J[0, 0] * np.eye(self.n))


def _metrics(n: int, metrics: Optional[MetricPair]) -> MetricPair:
    return MetricPair.euclidean(n) if metrics is None else metrics


def _tr(M) -> float:
    return float(np.trace(M))


# ---------------------------------------------------------------------------
# kinetic energy  T(phi, v, phidot)
# ---------------------------------------------------------------------------

KINETIC_FORMS = {
    "DAlembert": ("index", "green", "spatial"),
    "AffineAffine": ("material", "spatial", "split"),
    "AffineMetric": ("material", "cauchy"),
    "MetricAffine": ("spatial", "green"),
}


def kinetic_energy(
    model: InertiaModel,
    phi,
    v,
    phidot,
    metrics: Optional[MetricPair] = None,
    form: Optional[str] = None,
) -> float:
    phi = np.asarray(phi, dtype=float)
    v = np.asarray(v, dtype=float)
    phidot = np.asarray(phidot, dtype=float)
    form = form or KINETIC_FORMS[model.kind][0]
    if form not in KINETIC_FORMS[model.kind]:
        raise ValueError(f"form {form!r} not available for {model.kind}")
    check_nonsingular(phi)
    mt = _metrics(model.n, metrics)
    g, eta = mt.g, mt.eta
    inv = np.linalg.inv(phi)
    OmH = inv @ phidot
    Om = phidot @ inv
    vh = inv @ v
    G = phi.T @ g @ phi
    n = model.n

    if model.kind == "DAlembert":
        J, m = model.J, model.m
        if form == "index":
            return 0.5 * m * v @ g @ v + 0.5 * _tr(g @ phidot @ J @ phidot.T)
        if form == "green":
            return 0.5 * m * vh @ G @ vh + 0.5 * _tr(G @ OmH @ J @ OmH.T)
        Jphi = phi @ J @ phi.T
        return 0.5 * m * v @ g @ v + 0.5 * _tr(g @ Om @ Jphi @ Om.T)

    if model.kind == "AffineAffine":
        A, B = model.A, model.B
        if form == "material":
            return 0.5 * A * _tr(OmH @ OmH) + 0.5 * B * _tr(OmH) ** 2
        if form == "spatial":
            return 0.5 * A * _tr(Om @ Om) + 0.5 * B * _tr(Om) ** 2
        qdot = _tr(OmH) / n
        nu = OmH - qdot * np.eye(n)
        return 0.5 * A * _tr(nu @ nu) + 0.5 * n * (A + n * B) * qdot ** 2

    I, A, B, m = model.I, model.A, model.B, model.m
    if model.kind == "AffineMetric":
        if form == "material":
            W, M, w = OmH, eta, vh
        else:  # Cauchy-tensor form in spatial variables
            W, M, w = Om, inv.T @ eta @ inv, v
    else:
        if form == "spatial":
            W, M, w = Om, g, v
        else:  # Green-tensor form in co-moving variables
            W, M, w = OmH, G, vh
    return (
        0.5 * m * w @ M @ w
        + 0.5 * I * _tr(W.T @ M @ W @ np.linalg.inv(M))
        + 0.5 * A * _tr(W @ W)
        + 0.5 * B * _tr(W) ** 2
    )


# ---------------------------------------------------------------------------
# kinetic Hamiltonian  T(phi, p, P)
# ---------------------------------------------------------------------------

HAMILTONIAN_FORMS = {
    "DAlembert": ("index", "material", "spatial", "two_polar"),
    "AffineAffine": ("material", "spatial", "split", "two_polar"),
    "AffineMetric": ("index", "casimir", "split", "two_polar"),
    "MetricAffine": ("index", "casimir", "split", "two_polar"),
}


def _lattice_internal(model: InertiaModel, phi, P) -> float:
    """Invariant-model Hamiltonian in two-polar momenta (identity metrics).

    ``1/(4 alpha n) sum (p_a - p_b)^2 + 1/(32 alpha) sum M^2/sh^2 - 1/(32 alpha) sum N^2/ch^2
    + p^2 / (2 n (alpha + n B))`` plus the spin or vorticity term; all sums
    run over ordered pairs.
    """
    tp = two_polar_decompose(phi)
    tpm = two_polar_momenta(PhasePoint.internal(phi, P), tp, allow_degenerate=True)
    n = model.n
    q = tp.q
    d = 0.5 * (q[:, None] - q[None, :])
    off = ~np.eye(n, dtype=bool)
    a = model.alpha
    p = float(np.sum(tpm.p_a))
    dp = tpm.p_a[:, None] - tpm.p_a[None, :]
    value = (
        np.sum(dp ** 2) / (4 * a * n)
        + np.sum(tpm.M[off] ** 2 / np.sinh(d[off]) ** 2) / (32 * a)
        - np.sum(tpm.N[off] ** 2 / np.cosh(d[off]) ** 2) / (32 * a)
        + p ** 2 / (2 * n * (a + n * model.B))
    )
    if model.kind == "AffineMetric":
        value += 0.5 * model.inv_mu * skew_norm2(tpm.tauHat)
    elif model.kind == "MetricAffine":
        value += 0.5 * model.inv_mu * skew_norm2(tpm.rhoHat)
    return float(value)


def _dalembert_two_polar(model: InertiaModel, phi, P) -> float:
    """Isotropic d'Alembert Hamiltonian in two-polar momenta.

    ``1/(2I) sum P_a^2 + 1/(8I) sum M^2/(Q_a - Q_b)^2 + 1/(8I) sum N^2/(Q_a + Q_b)^2``
    with ``P_a = p_a / Q_a`` and ordered-pair sums.
    """
    if not model.is_isotropic_dalembert:
        raise ValueError("two-polar d'Alembert form needs an isotropic inertial tensor")
    I = model.J[0, 0]
    tp = two_polar_decompose(phi)
    tpm = two_polar_momenta(PhasePoint.internal(phi, P), tp, allow_degenerate=True)
    Q = tp.Q
    off = ~np.eye(model.n, dtype=bool)
    diff2 = (Q[:, None] - Q[None, :])[off] ** 2
    sum2 = (Q[:, None] + Q[None, :])[off] ** 2
    return float(
        np.sum((tpm.p_a / Q) ** 2) / (2 * I)
        + np.sum(tpm.M[off] ** 2 / diff2) / (8 * I)
        + np.sum(tpm.N[off] ** 2 / sum2) / (8 * I)
    )


def kinetic_hamiltonian(
    model: InertiaModel,
    phi,
    p,
    P,
    metrics: Optional[MetricPair] = None,
    form: Optional[str] = None,
) -> float:
    phi = np.asarray(phi, dtype=float)
    p = np.asarray(p, dtype=float)
    P = np.asarray(P, dtype=float)
    form = form or HAMILTONIAN_FORMS[model.kind][0]
    if form not in HAMILTONIAN_FORMS[model.kind]:
        raise ValueError(f"form {form!r} not available for {model.kind}")
    check_nonsingular(phi)
    mt = _metrics(model.n, metrics)
    if form == "two_polar" and not mt.is_euclidean:
        raise ValueError("two-polar forms assume identity metrics")
    g, eta = mt.g, mt.eta
    gi, etai = np.linalg.inv(g), np.linalg.inv(eta)
    n = model.n
    Sigma = phi @ P
    SigmaHat = P @ phi

    if model.kind == "DAlembert":
        J, m = model.J, model.m
        Ji = np.linalg.inv(J)
        trans = 0.5 / m * p @ gi @ p
        if form == "index":
            return trans + 0.5 * _tr(Ji @ P @ gi @ P.T)
        if form == "material":
            ph = phi.T @ p
            Gi = np.linalg.inv(phi.T @ g @ phi)
            return 0.5 / m * ph @ Gi @ ph + 0.5 * _tr(Ji @ SigmaHat @ Gi @ SigmaHat.T)
        if form == "spatial":
            Jphi_i = np.linalg.inv(phi @ J @ phi.T)
            return trans + 0.5 * _tr(Jphi_i @ Sigma @ gi @ Sigma.T)
        return trans + _dalembert_two_polar(model, phi, P)

    if model.kind == "AffineAffine":
        A, B = model.A, model.B
        if form in ("material", "spatial"):
            W = SigmaHat if form == "material" else Sigma
            return 0.5 / A * _tr(W @ W) - B / (2 * A * (A + n * B)) * _tr(W) ** 2
        if form == "split":
            dev = SigmaHat - _tr(SigmaHat) / n * np.eye(n)
            return 0.5 / A * _tr(dev @ dev) + _tr(SigmaHat) ** 2 / (2 * n * (A + n * B))
        return _lattice_internal(model, phi, P)

    I, A, B, m = model.I, model.A, model.B, model.m
    if model.kind == "AffineMetric":
        ph = phi.T @ p
        trans = 0.5 / m * ph @ etai @ ph
        W, M, Mi = SigmaHat, eta, etai
    else:
        trans = 0.5 / m * p @ gi @ p
        W, M, Mi = Sigma, g, gi
    skew = W - Mi @ W.T @ M
    if form == "index":
        # reciprocal constants 1/I~, 1/A~, 1/B~ of the index form
        ri = I / (I ** 2 - A ** 2)
        ra = A / (A ** 2 - I ** 2)
        rb = -B / ((I + A) * (I + A + n * B))
        internal = 0.5 * ri * _tr(W.T @ M @ W @ Mi) + 0.5 * ra * _tr(W @ W) + 0.5 * rb * _tr(W) ** 2
    elif form == "casimir":
        internal = (
            0.5 * model.inv_alpha * _tr(W @ W)
            + 0.5 * model.inv_beta * _tr(W) ** 2
            + 0.5 * model.inv_mu * skew_norm2(skew)
        )
    elif form == "split":
        dev = W - _tr(W) / n * np.eye(n)
        internal = (
            0.5 / (I + A) * _tr(dev @ dev)
            + _tr(W) ** 2 / (2 * n * (I + A + n * B))
            + 0.5 * model.inv_mu * skew_norm2(skew)
        )
    else:
        internal = _lattice_internal(model, phi, P)
    return float(trans + internal)


# ---------------------------------------------------------------------------
# Legendre maps
# ---------------------------------------------------------------------------

def legendre(model: InertiaModel, phi, v, phidot, metrics: Optional[MetricPair] = None):
    """Velocities ``(v, phidot)`` to canonical momenta ``(p, P)``."""
    phi = np.asarray(phi, dtype=float)
    v = np.asarray(v, dtype=float)
    phidot = np.asarray(phidot, dtype=float)
    check_nonsingular(phi)
    mt = _metrics(model.n, metrics)
    g, eta = mt.g, mt.eta
    n = model.n
    inv = np.linalg.inv(phi)
    if model.kind == "DAlembert":
        return model.m * g @ v, model.J @ phidot.T @ g
    if model.kind == "AffineAffine":
        OmH = inv @ phidot
        SigmaHat = model.A * OmH + model.B * _tr(OmH) * np.eye(n)
        return np.zeros(n), SigmaHat @ inv
    I, A, B = model.I, model.A, model.B
    if model.kind == "AffineMetric":
        OmH = inv @ phidot
        adj = np.linalg.solve(eta, OmH.T @ eta)
        SigmaHat = I * adj + A * OmH + B * _tr(OmH) * np.eye(n)
        return model.m * inv.T @ eta @ inv @ v, SigmaHat @ inv
    Om = phidot @ inv
    adj = np.linalg.solve(g, Om.T @ g)
    Sigma = I * adj + A * Om + B * _tr(Om) * np.eye(n)
    return model.m * g @ v, inv @ Sigma


def _invert_invariant(W, Mi_adj, c_same, c_adj, c_tr, n):
    """Solve ``W = c_adj X* + c_same X + c_tr Tr(X) I`` for ``X`` (``*`` the metric adjoint)."""
    denom_tr = c_same + c_adj + n * c_tr
    d_minus = c_same - c_adj
    d_plus = c_same + c_adj
    if abs(denom_tr) < 1e-300 or abs(d_minus) < 1e-300 or abs(d_plus) < 1e-300:
        raise DegenerateLegendre("kinetic metric has a null direction")
    trX = _tr(W) / denom_tr
    Wadj = Mi_adj(W)
    sym_part = (W + Wadj - 2 * c_tr * trX * np.eye(n)) / d_plus
    skew_part = (W - Wadj) / d_minus
    return 0.5 * (sym_part + skew_part)


def inverse_legendre(model: InertiaModel, phi, p, P, metrics: Optional[MetricPair] = None):
    """Canonical momenta ``(p, P)`` to velocities ``(v, phidot)``."""
    phi = np.asarray(phi, dtype=float)
    p = np.asarray(p, dtype=float)
    P = np.asarray(P, dtype=float)
    check_nonsingular(phi)
    mt = _metrics(model.n, metrics)
    g, eta = mt.g, mt.eta
    n = model.n
    if model.kind == "DAlembert":
        if abs(np.linalg.det(model.J)) < 1e-300:
            raise DegenerateLegendre("singular inertial tensor")
        return np.linalg.solve(g, p) / model.m, np.linalg.solve(g, P.T) @ np.linalg.inv(model.J)
    if model.kind == "AffineAffine":
        SigmaHat = P @ phi
        OmH = _invert_invariant(SigmaHat, lambda X: X.T, model.A, 0.0, model.B, n)
        return np.zeros(n), phi @ OmH
    I, A, B = model.I, model.A, model.B
    if model.kind == "AffineMetric":
        SigmaHat = P @ phi
        OmH = _invert_invariant(SigmaHat, lambda X: np.linalg.solve(eta, X.T @ eta), A, I, B, n)
        inv = np.linalg.inv(phi)
        C = inv.T @ eta @ inv
        return np.linalg.solve(C, p) / model.m, phi @ OmH
    Sigma = phi @ P
    Om = _invert_invariant(Sigma, lambda X: np.linalg.solve(g, X.T @ g), A, I, B, n)
    return np.linalg.solve(g, p) / model.m, Om @ phi


# ---------------------------------------------------------------------------
# analytic gradients of the kinetic Hamiltonian
# ---------------------------------------------------------------------------

def kinetic_gradients(model: InertiaModel, phi, p, P, metrics: Optional[MetricPair] = None):
    """Partial derivatives ``(dT/dphi, dT/dp, dT/dP)`` of the kinetic Hamiltonian.

    ``dT/dphi`` is indexed like ``phi`` (``[i, A]``) and ``dT/dP`` like ``P``
    (``[A, i]``).
    """
    mt = _metrics(model.n, metrics)
    g, eta = mt.g, mt.eta
    n = model.n
    if model.kind == "DAlembert":
        gi = np.linalg.inv(g)
        Ji = np.linalg.inv(model.J)
        return np.zeros((n, n)), gi @ p / model.m, Ji @ P @ gi

    def internal_grad(W, M):
        # derivative of the Casimir-form internal Hamiltonian w.r.t. W[A, B]
        out = model.inv_alpha * W.T + model.inv_beta * _tr(W) * np.eye(n)
        if model.inv_mu:
            out = out + model.inv_mu * (M @ W @ np.linalg.inv(M) - W.T)
        return out

    if model.kind in ("AffineAffine", "AffineMetric"):
        SigmaHat = P @ phi
        Gr = internal_grad(SigmaHat, eta)
        dphi = P.T @ Gr
        dP = Gr @ phi.T
        dp = np.zeros(n)
        if model.kind == "AffineMetric":
            etai = np.linalg.inv(eta)
            ph = phi.T @ p
            w = etai @ ph
            dp = phi @ w / model.m
            dphi = dphi + np.outer(p, w) / model.m
        return dphi, dp, dP

    Sigma = phi @ P
    Gr = internal_grad(Sigma, g)
    return Gr @ P.T, np.linalg.solve(g, p) / model.m, phi.T @ Gr
