"""Hamiltonian dynamics, conservation audits and closed-form geodesics."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq, minimize_scalar

from .errors import Diverged, NumericalFailure
from .geometry import MetricPair, two_polar_decompose
from .kinematics import (
    PhasePoint,
    join_vector,
    planar_angular_momenta,
    planar_phase_point,
    split_vector,
    two_polar_momenta,
)
from .models import InertiaModel, kinetic_gradients, kinetic_hamiltonian
from .potentials import NoPotential, Potential

DIVERGENCE_NORM = 1e12


def hamiltonian(
    model: InertiaModel,
    potential: Optional[Potential],
    point: PhasePoint,
    metrics: Optional[MetricPair] = None,
) -> float:
    potential = potential or NoPotential()
    return kinetic_hamiltonian(model, point.phi, point.p, point.P, metrics) + potential.value(
        point.x, point.phi, metrics
    )


class PhaseTangent(NamedTuple):
    xdot: np.ndarray
    phidot: np.ndarray
    pdot: np.ndarray
    Pdot: np.ndarray


def _vector_field(model: InertiaModel, potential: Potential, metrics: Optional[MetricPair]):
    n = model.n

    def rhs(z: np.ndarray) -> np.ndarray:
        x, phi, p, P = split_vector(z, n)
        dphi, dp, dP = kinetic_gradients(model, phi, p, P, metrics)
        if not potential.is_zero:
            vx, vphi = potential.gradient(x, phi, metrics)
            dphi = dphi + vphi
        else:
            vx = np.zeros(n)
        out = join_vector(dp, dP.T, -vx, -dphi.T)
        if not np.all(np.isfinite(out)):
            raise NumericalFailure("non-finite gradient of the Hamiltonian")
        return out

    return rhs


def hamilton_rhs(
    model: InertiaModel,
    potential: Optional[Potential],
    point: PhasePoint,
    metrics: Optional[MetricPair] = None,
) -> PhaseTangent:
    """Right-hand side of Hamilton's equations from analytic gradients."""
    rhs = _vector_field(model, potential or NoPotential(), metrics)
    xd, phid, pd, Pd = split_vector(rhs(point.to_vector()), model.n)
    return PhaseTangent(xd.copy(), phid.copy(), pd.copy(), Pd.copy())


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

@dataclass
class ConservationReport:
    """Largest departures from the initial values along a run.

    The energy drift is relative to ``|H(0)|``.  Matrix drifts are Frobenius
    norms of ``X(t) - X(0)`` divided by ``max(1, |X(0)|)``.
    """

    energy_drift: float
    spin_drift: float
    vorticity_drift: float
    deviator_drift: float

    def as_dict(self) -> dict:
        return {
            "energy_drift": self.energy_drift,
            "spin_drift": self.spin_drift,
            "vorticity_drift": self.vorticity_drift,
            "deviator_drift": self.deviator_drift,
        }


@dataclass
class Trajectory:
    times: np.ndarray
    x: np.ndarray
    phi: np.ndarray
    p: np.ndarray
    P: np.ndarray
    energy: np.ndarray = field(default_factory=lambda: np.zeros(0))
    audit: Optional[ConservationReport] = None

    @property
    def states(self) -> list[PhasePoint]:
        return [PhasePoint(self.x[k], self.phi[k], self.p[k], self.P[k]) for k in range(len(self.times))]

    @property
    def invariants(self) -> np.ndarray:
        s = np.linalg.svd(self.phi, compute_uv=False)
        return np.log(s[:, ::-1])

    def spins(self):
        Sigma = self.phi @ self.P
        SigmaHat = self.P @ self.phi
        S = Sigma - np.swapaxes(Sigma, 1, 2)
        V = SigmaHat - np.swapaxes(SigmaHat, 1, 2)
        return Sigma, SigmaHat, S, V


def _drift(stack: np.ndarray) -> float:
    ref = stack[0]
    scale = max(1.0, float(np.linalg.norm(ref)))
    return float(np.max(np.linalg.norm((stack - ref).reshape(len(stack), -1), axis=1)) / scale)


def conservation_report(traj: Trajectory) -> ConservationReport:
    """Drifts of energy, spin, vorticity and deviatoric affine spin (identity metrics)."""
    Sigma, _, S, V = traj.spins()
    n = Sigma.shape[-1]
    tr = np.trace(Sigma, axis1=1, axis2=2)
    dev = Sigma - tr[:, None, None] / n * np.eye(n)
    H = traj.energy
    if H.size:
        h0 = abs(H[0])
        scale = h0 if h0 > 1e-300 else 1.0
        energy_drift = float(np.max(np.abs(H - H[0])) / scale)
    else:
        energy_drift = 0.0
    return ConservationReport(energy_drift, _drift(S), _drift(V), _drift(dev))


def project_incompressible(point: PhasePoint) -> PhasePoint:
    """Remove the trace of the co-moving affine spin (zero dilatational momentum)."""
    SigmaHat = point.P @ point.phi
    n = point.n
    SigmaHat = SigmaHat - np.trace(SigmaHat) / n * np.eye(n)
    return PhasePoint(point.x, point.phi, point.p, SigmaHat @ np.linalg.inv(point.phi))


MAX_HALVINGS = 10
STALL_TOL = 1e-9


def _midpoint_step(rhs, z0, dt, tol, max_iter, depth=0):
    """One implicit midpoint step solved by fixed-point iteration.

    When the iteration stalls the step is replaced by two half steps; a
    composition of midpoint steps is still symplectic.
    """
    z1 = z0 + dt * rhs(z0)
    scale = max(1.0, float(np.max(np.abs(z0))))
    previous = np.inf
    for k in range(max_iter):
        z_new = z0 + dt * rhs(0.5 * (z0 + z1))
        if not np.all(np.isfinite(z_new)):
            break
        increment = float(np.max(np.abs(z_new - z1)))
        if increment <= tol * scale:
            return z_new
        # ill-conditioned configurations put a roundoff floor under the
        # increments; accept once contraction has stopped well below it
        if k >= 4 and increment > 0.5 * previous and increment <= STALL_TOL * scale:
            return z_new
        previous = increment
        z1 = z_new
    if depth >= MAX_HALVINGS:
        raise NumericalFailure(f"implicit midpoint fixed-point iteration did not converge in {max_iter} iterations")
    half = _midpoint_step(rhs, z0, 0.5 * dt, tol, max_iter, depth + 1)
    return _midpoint_step(rhs, half, 0.5 * dt, tol, max_iter, depth + 1)


def _rk4_step(rhs, z0, dt):
    k1 = rhs(z0)
    k2 = rhs(z0 + 0.5 * dt * k1)
    k3 = rhs(z0 + 0.5 * dt * k2)
    k4 = rhs(z0 + dt * k3)
    return z0 + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


SCHEMES = ("ImplicitMidpoint", "RK4")


def integrate(
    model: InertiaModel,
    potential: Optional[Potential],
    initial: PhasePoint,
    scheme: str = "ImplicitMidpoint",
    dt: float = 1e-3,
    steps: int = 10_000,
    *,
    record_every: int = 1,
    metrics: Optional[MetricPair] = None,
    incompressible: bool = False,
    tol: float = 1e-12,
    max_iter: int = 50,
    stop: Optional[Callable[[PhasePoint], bool]] = None,
) -> Trajectory:
    """Integrate Hamilton's equations from ``initial``.

    Implicit midpoint is symplectic and keeps every quadratic first integral
    (spin, vorticity, affine spins of invariant models) up to the fixed-point
    tolerance.  ``stop`` may end the run early; it is checked at recorded
    samples.
    """
    if dt <= 0:
        raise ValueError("time step must be positive")
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    potential = potential or NoPotential()
    if incompressible:
        initial = project_incompressible(initial)
    n = model.n
    rhs = _vector_field(model, potential, metrics)
    z = initial.to_vector()
    samples = [z.copy()]
    times = [0.0]

    def build(records, ts):
        Z = np.array(records)
        k = n + n * n
        traj = Trajectory(
            times=np.array(ts),
            x=Z[:, :n],
            phi=Z[:, n:k].reshape(-1, n, n),
            p=Z[:, k:k + n],
            P=np.swapaxes(Z[:, k + n:].reshape(-1, n, n), 1, 2),
        )
        traj.energy = np.array([
            hamiltonian(model, potential, PhasePoint(traj.x[i], traj.phi[i], traj.p[i], traj.P[i]), metrics)
            for i in range(len(ts))
        ])
        traj.audit = conservation_report(traj)
        return traj

    for step in range(1, steps + 1):
        if scheme == "ImplicitMidpoint":
            z = _midpoint_step(rhs, z, dt, tol, max_iter)
        else:
            z = _rk4_step(rhs, z, dt)
        _, phi, _, _ = split_vector(z, n)
        if not np.all(np.isfinite(z)) or np.max(np.abs(z)) > DIVERGENCE_NORM or np.linalg.det(phi) <= 0:
            raise Diverged(f"state left the admissible region at step {step}", build(samples, times))
        if step % record_every == 0 or step == steps:
            samples.append(z.copy())
            times.append(step * dt)
            if stop is not None and stop(PhasePoint.from_vector(z, n)):
                break
    return build(samples, times)


# ---------------------------------------------------------------------------
# closed-form geodesics of the affine-affine model
# ---------------------------------------------------------------------------

def geodesic_exponential(phi0, OmegaHat0, t) -> np.ndarray:
    """``phi(t) = phi0 expm(t OmegaHat0)`` for scalar ``t`` or an array of times.

    Without a potential the affine-affine co-moving affine spin is conserved,
    hence so is the co-moving velocity, and geodesics are one-parameter
    subgroups translated by ``phi0``.
    """
    phi0 = np.asarray(phi0, dtype=float)
    W = np.asarray(OmegaHat0, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if t_arr.ndim == 0:
        return phi0 @ expm(float(t_arr) * W)
    return np.stack([phi0 @ expm(float(ti) * W) for ti in t_arr])


# ---------------------------------------------------------------------------
# planar boundedness
# ---------------------------------------------------------------------------

class Boundedness(str, Enum):
    BOUNDED = "Bounded"
    UNBOUNDED = "Unbounded"
    MARGINAL = "Marginal"


def classify_2d(p_alpha: float, p_beta: float) -> Boundedness:
    """Same-sign spin and vorticity make the far shear potential attractive."""
    prod = p_alpha * p_beta
    if prod > 0:
        return Boundedness.BOUNDED
    if prod < 0:
        return Boundedness.UNBOUNDED
    return Boundedness.MARGINAL


@dataclass(frozen=True)
class PlanarShear:
    """Reduced shear dynamics of a planar invariant model without potential.

    ``H_x = p_x^2 / alpha + V(x)`` with
    ``V(x) = m^2/(16 alpha sh^2(x/2)) - n^2/(16 alpha ch^2(x/2)) + shift``,
    ``m = p_beta - p_alpha`` and ``n = p_beta + p_alpha``.
    """

    alpha: float
    p_alpha: float
    p_beta: float
    shift: float = 0.0

    @classmethod
    def for_model(cls, model: InertiaModel, p_alpha: float, p_beta: float) -> "PlanarShear":
        if model.n != 2 or model.kind == "DAlembert":
            raise ValueError("planar shear reduction needs an n = 2 invariant model")
        shift = 0.0
        if model.kind == "MetricAffine":
            shift = 0.5 * model.inv_mu * p_alpha ** 2
        elif model.kind == "AffineMetric":
            shift = 0.5 * model.inv_mu * p_beta ** 2
        return cls(model.alpha, p_alpha, p_beta, shift)

    @property
    def m_hat(self) -> float:
        return self.p_beta - self.p_alpha

    @property
    def n_hat(self) -> float:
        return self.p_beta + self.p_alpha

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        return (
            self.m_hat ** 2 / (16 * self.alpha * np.sinh(x / 2) ** 2)
            - self.n_hat ** 2 / (16 * self.alpha * np.cosh(x / 2) ** 2)
            + self.shift
        )

    def energy(self, x: float, p_x: float) -> float:
        return p_x ** 2 / self.alpha + float(self.potential(x))

    def turning_points(self, energy: float, x_hint: float = 1.0) -> tuple[float, float]:
        """Interval of ``|x|`` allowed at the given shear energy.

        The inner end is 0 when the centrifugal barrier vanishes; the outer
        end is infinite when the energy reaches the asymptotic level.
        """
        asymptote = self.shift
        if self.m_hat == 0:
            x_min = 0.0
        else:
            res = minimize_scalar(lambda s: float(self.potential(s)), bounds=(1e-8, 80.0), method="bounded")
            x_min = float(res.x)
        f = lambda s: float(self.potential(s)) - energy
        inner = 0.0
        if self.m_hat != 0:
            lo = 1e-12
            inner = brentq(f, lo, x_min) if f(x_min) < 0 else x_min
        if energy >= asymptote:
            return inner, np.inf
        hi = max(x_min, x_hint, 1.0)
        while f(hi) < 0:
            hi *= 2.0
        outer = brentq(f, max(x_min, 1e-12), hi) if f(max(x_min, 1e-12)) < 0 else max(x_min, 1e-12)
        return inner, outer


def planar_shear_state(point: PhasePoint) -> tuple[float, float]:
    """``(x, p_x)`` of a planar phase point: ``x = q2 - q1`` and ``p_x = (p_2 - p_1)/2``."""
    tp = two_polar_decompose(point.phi)
    tpm = two_polar_momenta(point, tp, allow_degenerate=True)
    return float(tp.q[1] - tp.q[0]), float(0.5 * (tpm.p_a[1] - tpm.p_a[0]))


def planar_momenta(point: PhasePoint) -> tuple[float, float]:
    return planar_angular_momenta(point)


def planar_shear_initial(
    model: InertiaModel,
    p_alpha: float,
    p_beta: float,
    x0: Optional[float] = None,
    p_x: float = 0.0,
    alpha: float = 0.0,
    beta: float = 0.0,
    lift: float = 0.0,
) -> PhasePoint:
    """Incompressible planar phase point with prescribed spin, vorticity and shear state.

    ``x0`` defaults to the bottom of the shear well when the well lies below
    its asymptote and to ``1`` otherwise (``0.5`` when the well bottom is the
    degenerate configuration ``x = 0``).  A positive ``lift`` replaces
    ``p_x`` by the outward momentum that raises the shear energy that
    fraction of the way from the well bottom to the asymptote.
    """
    shear = PlanarShear.for_model(model, p_alpha, p_beta)
    res = minimize_scalar(lambda s: float(shear.potential(s)), bounds=(1e-6, 60.0), method="bounded")
    bottom = float(shear.potential(res.x))
    has_well = bottom < shear.shift
    if x0 is None:
        if not has_well:
            x0 = 1.0
        else:
            x0 = 0.5 if shear.m_hat == 0 else float(res.x)
    if lift > 0.0 and has_well:
        if shear.m_hat == 0:
            # the well bottom is x = 0, where only the cosh term survives
            bottom = shear.shift - shear.n_hat ** 2 / (16 * shear.alpha)
        target = bottom + lift * (shear.shift - bottom)
        gap = target - float(shear.potential(x0))
        if gap < 0:
            raise ValueError("requested shear energy lies below the potential at x0")
        p_x = float(np.sqrt(shear.alpha * gap))
    return planar_phase_point(alpha, (-0.5 * x0, 0.5 * x0), beta, (-p_x, p_x), p_alpha, p_beta)
