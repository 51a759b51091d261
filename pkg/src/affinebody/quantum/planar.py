"""Reduced quantum problems of a planar (n = 2) affine body.

Wave functions are expanded as
``Psi(alpha; qbar, x; beta) = sum_{m,n} f^{mn}(qbar, x) exp(i m alpha) exp(i n beta)``
with ``alpha``, ``beta`` the angles of the two rotation factors, ``qbar``
the mean logarithmic invariant and ``x = q2 - q1`` the shear.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import InvalidModel, Unconverged
from ..models import InertiaModel
from .channels import Channel2D
from .operators1d import (
    CONVERGENCE_RTOL,
    ReducedOperator1D,
    Spectrum,
    solve_1d,
)

DEFAULT_X_MAX = 40.0

Function1D = Callable[[np.ndarray], np.ndarray]


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# invariant models
# ---------------------------------------------------------------------------

def channel_shift(model: InertiaModel, m: int, n: int, hbar: float = 1.0) -> float:
    """Constant offset from the extra rotational term of the mixed models."""
    if model.kind == "MetricAffine":
        return 0.5 * model.inv_mu * (hbar * m) ** 2
    if model.kind == "AffineMetric":
        return 0.5 * model.inv_mu * (hbar * n) ** 2
    return 0.0


def shear_potential(model: InertiaModel, m: int, n: int, hbar: float = 1.0) -> Function1D:
    """``hbar^2 (n-m)^2 / (16 a sh^2(x/2)) - hbar^2 (n+m)^2 / (16 a ch^2(x/2))`` plus the channel shift."""
    a = model.alpha
    lo = hbar ** 2 * (n - m) ** 2 / (16.0 * a)
    hi = hbar ** 2 * (n + m) ** 2 / (16.0 * a)
    shift = channel_shift(model, m, n, hbar)

    def V(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            centrifugal = lo / np.sinh(0.5 * x) ** 2 if lo else 0.0
        return centrifugal - hi / np.cosh(0.5 * x) ** 2 + shift

    return V


def reduced_kinetic_2d(
    model: InertiaModel,
    m: int,
    n: int,
    hbar: float = 1.0,
    x_max: float = DEFAULT_X_MAX,
    q_range: tuple[float, float] = (-10.0, 10.0),
) -> tuple[ReducedOperator1D, ReducedOperator1D]:
    """Shear and dilatation operators of channel ``(m, n)`` for an invariant model.

    The shear operator is ``-(hbar^2/a) (1/sh x) d/dx (sh x d/dx) + V_cfg``
    on ``(0, x_max)`` with ``a = A`` (or ``I + A`` for mixed models).  Its
    continuum starts at ``hbar^2/(4a)`` above the channel shift.  The
    dilatation operator is ``-hbar^2/(4(a + 2B)) d^2/dqbar^2``.
    """
    if model.n != 2:
        raise InvalidModel("planar reduction needs n = 2")
    if model.kind == "DAlembert":
        raise InvalidModel("the d'Alembert model separates in Q+- or polar charts; use the dedicated solvers")
    ch = Channel2D(m, n)
    a = model.alpha
    c_shear = hbar ** 2 / a
    shift = channel_shift(model, ch.m, ch.n, hbar)
    shear = ReducedOperator1D(
        variable="x",
        coefficient=c_shear,
        weight=lambda x: np.abs(np.sinh(x)),
        potential=shear_potential(model, ch.m, ch.n, hbar),
        domain=(0.0, x_max),
        left="dirichlet" if ch.m != ch.n else "regular",
        right="dirichlet",
        threshold=0.25 * c_shear + shift,
        label={"m": ch.m, "n": ch.n},
    )
    dil = ReducedOperator1D(
        variable="q",
        coefficient=hbar ** 2 / (4.0 * (a + 2.0 * model.B)),
        weight=lambda q: np.ones_like(np.asarray(q, dtype=float)),
        potential=_zero,
        domain=q_range,
        left="dirichlet",
        right="dirichlet",
        label={"m": ch.m, "n": ch.n},
    )
    return shear, dil


@dataclass
class BoundStates:
    m: int
    n: int
    count: int
    energies: np.ndarray
    threshold: float
    N: int
    max_change: float


def bound_state_count(
    model: InertiaModel,
    m: int,
    n: int,
    *,
    hbar: float = 1.0,
    N: int = 2000,
    x_max: float = DEFAULT_X_MAX,
    rtol: float = CONVERGENCE_RTOL,
    max_points: int = 64_000,
    k: int = 12,
) -> BoundStates:
    """Levels of the geodetic shear channel below its continuum threshold.

    Binding energies must agree to ``rtol`` between successive grid
    doublings, and the count must be stable; otherwise :class:`Unconverged`
    is raised.
    """
    shear, _ = reduced_kinetic_2d(model, m, n, hbar, x_max)
    spec = solve_1d(shear, N, k, rtol=rtol, max_points=max_points, below_threshold=True)
    if not np.all(spec.converged):
        raise Unconverged(
            f"channel ({m},{n}): bound levels changed by {spec.metadata['max_change']:.2e} at N = {spec.metadata['N']}"
        )
    return BoundStates(
        m=m, n=n, count=len(spec), energies=spec.eigenvalues,
        threshold=shear.threshold, N=spec.metadata["N"], max_change=spec.metadata["max_change"],
    )


# ---------------------------------------------------------------------------
# d'Alembert model: Q+- and polar charts
# ---------------------------------------------------------------------------

def _box_confirmed(op: ReducedOperator1D, N: int, k: int, rtol: float, max_points: int) -> Spectrum:
    """Levels that survive both grid refinement and doubling of the box.

    Box-quantized continuum levels move when the box grows; genuine bound
    levels do not.
    """
    a, b = op.domain
    small = solve_1d(op, N, k, rtol=rtol, max_points=max_points)
    big = solve_1d(op.with_domain((a, a + 2 * (b - a))), 2 * N, k, rtol=rtol, max_points=2 * max_points)
    n = min(len(small), len(big))
    agree = np.abs(small.eigenvalues[:n] - big.eigenvalues[:n]) <= rtol * np.maximum(np.abs(big.eigenvalues[:n]), 1e-300)
    ok = agree & small.converged[:n] & big.converged[:n]
    count = int(np.argmin(ok)) if not np.all(ok) else n
    meta = dict(small.metadata)
    meta["box_confirmed"] = True
    return Spectrum(
        eigenvalues=small.eigenvalues[:count],
        labels=small.labels[:count],
        converged=ok[:count],
        metadata=meta,
    )


def qpm_operator(sign: int, m: int, n: int, V: Optional[Function1D], I: float = 1.0,
                 hbar: float = 1.0, Q_max: float = 12.0) -> ReducedOperator1D:
    """Radial-type operator in ``Q+`` (``sign=+1``) or ``Q-`` (``sign=-1``).

    ``-(hbar^2/2I)(d^2 + (1/Q) d) + hbar^2 (m -+ n)^2/(8 I Q^2) + V``.
    """
    ch = Channel2D(m, n)
    ell2 = (ch.m - sign * ch.n) ** 2
    extra = V or _zero

    def potential(Q):
        Q = np.asarray(Q, dtype=float)
        return hbar ** 2 * ell2 / (8.0 * I * Q ** 2) + extra(Q)

    return ReducedOperator1D(
        variable="Qplus" if sign > 0 else "Qminus",
        coefficient=hbar ** 2 / (2.0 * I),
        weight=lambda Q: np.abs(np.asarray(Q, dtype=float)),
        potential=potential,
        domain=(0.0, Q_max),
        left="dirichlet" if ell2 else "regular",
        right="dirichlet",
        label={"m": ch.m, "n": ch.n, "chart": "Qplus" if sign > 0 else "Qminus"},
    )


def dalembert_qpm_solver(
    m: int,
    n: int,
    V_plus: Optional[Function1D],
    V_minus: Optional[Function1D],
    *,
    I: float = 1.0,
    hbar: float = 1.0,
    Q_max: float = 12.0,
    N: int = 2000,
    k: int = 5,
    rtol: float = CONVERGENCE_RTOL,
    max_points: int = 32_000,
) -> tuple[Spectrum, Spectrum]:
    """Bound spectra of the two separated channels; totals are pairwise sums."""
    sp = _box_confirmed(qpm_operator(+1, m, n, V_plus, I, hbar, Q_max), N, k, rtol, max_points)
    sm = _box_confirmed(qpm_operator(-1, m, n, V_minus, I, hbar, Q_max), N, k, rtol, max_points)
    return sp, sm


def qpm_total_levels(plus: Spectrum, minus: Spectrum, k: int = 5) -> Spectrum:
    sums = plus.eigenvalues[:, None] + minus.eigenvalues[None, :]
    labels = [dict(k_plus=i, k_minus=j) for i in range(len(plus)) for j in range(len(minus))]
    order = np.argsort(sums.ravel(), kind="stable")[:k]
    return Spectrum(sums.ravel()[order], [labels[i] for i in order], metadata={"chart": "Qpm"})


def angular_operator(m: int, n: int, V_phi: Optional[Function1D], I: float = 1.0, hbar: float = 1.0,
                     domain: tuple[float, float] = (0.0, np.pi / 2), right: str = "regular") -> ReducedOperator1D:
    """``-(hbar^2/2I)(d^2 + 2 cot(2phi) d) + (hbar^2/2I)(m^2 + 2mn cos 2phi + n^2)/sin^2 2phi + V_phi``."""
    ch = Channel2D(m, n)
    extra = V_phi or _zero
    c = hbar ** 2 / (2.0 * I)

    def potential(phi):
        phi = np.asarray(phi, dtype=float)
        num = ch.m ** 2 + 2 * ch.m * ch.n * np.cos(2 * phi) + ch.n ** 2
        return c * num / np.sin(2 * phi) ** 2 + extra(phi)

    return ReducedOperator1D(
        variable="phi_angle",
        coefficient=c,
        weight=lambda phi: np.abs(np.sin(2 * np.asarray(phi, dtype=float))),
        potential=potential,
        domain=domain,
        left="regular",
        right=right,
        label={"m": ch.m, "n": ch.n},
    )


def radial_operator(E_phi: float, V_r: Optional[Function1D], I: float = 1.0, hbar: float = 1.0,
                    r_max: float = 12.0, label: Optional[dict] = None) -> ReducedOperator1D:
    """``-(hbar^2/2I)(d^2 + (3/r) d) + E_phi / r^2 + V_r``."""
    extra = V_r or _zero

    def potential(r):
        r = np.asarray(r, dtype=float)
        return E_phi / r ** 2 + extra(r)

    return ReducedOperator1D(
        variable="r",
        coefficient=hbar ** 2 / (2.0 * I),
        weight=lambda r: np.abs(np.asarray(r, dtype=float)) ** 3,
        potential=potential,
        domain=(0.0, r_max),
        left="regular",
        right="dirichlet",
        label=label or {},
    )


def dalembert_polar_solver(
    m: int,
    n: int,
    V_r: Optional[Function1D],
    V_phi: Optional[Function1D],
    *,
    I: float = 1.0,
    hbar: float = 1.0,
    r_max: float = 12.0,
    N: int = 2000,
    n_angular: int = 5,
    n_radial: int = 5,
    k: int = 5,
    phi_domain: tuple[float, float] = (0.0, np.pi / 2),
    phi_right: str = "regular",
    rtol: float = CONVERGENCE_RTOL,
    max_points: int = 32_000,
) -> Spectrum:
    """Separated polar-chart spectrum: angular levels feed ``E_phi / r^2`` into the radial problem.

    Labels are ``(m, n, k, mu)`` with ``k`` the angular and ``mu`` the
    radial quantum number.
    """
    ang = solve_1d(angular_operator(m, n, V_phi, I, hbar, phi_domain, phi_right), N, n_angular,
                   rtol=rtol, max_points=max_points)
    energies, labels, flags = [], [], []
    for ka, E_phi in enumerate(ang.eigenvalues):
        rad = _box_confirmed(radial_operator(E_phi, V_r, I, hbar, r_max, {"m": m, "n": n, "k": ka}),
                             N, n_radial, rtol, max_points)
        for mu, E in enumerate(rad.eigenvalues):
            energies.append(E)
            labels.append({"m": m, "n": n, "k": ka, "mu": mu})
            flags.append(bool(rad.converged[mu] and ang.converged[ka]))
    energies = np.asarray(energies)
    order = np.argsort(energies, kind="stable")[:k]
    return Spectrum(
        energies[order],
        [labels[i] for i in order],
        np.asarray(flags, dtype=bool)[order],
        metadata={"chart": "polar", "angular_N": ang.metadata["N"], "angular_levels": ang.eigenvalues.tolist()},
    )


def polar_trig_spectrum(m: int, n: int, kappa: float = 1.0, **kw) -> Spectrum:
    """Polar-chart spectrum of ``2 kappa/(r^2 cos 2phi) + (kappa/2) r^2`` on the sector ``phi < pi/4``."""
    return dalembert_polar_solver(
        m, n,
        V_r=lambda r: 0.5 * kappa * r ** 2,
        V_phi=lambda phi: 2.0 * kappa / np.cos(2 * phi),
        phi_domain=(0.0, np.pi / 4),
        phi_right="dirichlet",
        **kw,
    )


# ---------------------------------------------------------------------------
# Fourier reduction over the two rotation angles
# ---------------------------------------------------------------------------

def fourier_labels(count: int) -> np.ndarray:
    return np.fft.fftfreq(count, d=1.0 / count).astype(int)


def peter_weyl_reduce_2d(samples: np.ndarray, tol: float = 0.0) -> dict:
    """Channel map ``{(m, n): f^{mn}}`` from samples on a uniform ``(alpha, beta)`` grid.

    ``samples`` has shape ``(N_alpha, N_beta, *grid)``.  Channels whose
    amplitude never exceeds ``tol`` in magnitude are dropped (none when
    ``tol = 0``).
    """
    samples = np.asarray(samples)
    na, nb = samples.shape[:2]
    coeffs = np.fft.fft2(samples, axes=(0, 1)) / (na * nb)
    out = {}
    for i, m in enumerate(fourier_labels(na)):
        for j, n in enumerate(fourier_labels(nb)):
            f = coeffs[i, j]
            if tol == 0.0 or np.max(np.abs(f)) > tol:
                out[(int(m), int(n))] = f
    return out


def synthesize_2d(channels: dict, n_alpha: int, n_beta: int) -> np.ndarray:
    """Inverse of :func:`peter_weyl_reduce_2d` for channels representable on the grid."""
    if not channels:
        raise ValueError("empty channel map")
    sample = next(iter(channels.values()))
    coeffs = np.zeros((n_alpha, n_beta) + np.shape(sample), dtype=complex)
    for (m, n), f in channels.items():
        if not (-(n_alpha // 2) <= m < (n_alpha + 1) // 2 and -(n_beta // 2) <= n < (n_beta + 1) // 2):
            raise ValueError(f"channel ({m},{n}) is aliased on a {n_alpha}x{n_beta} grid")
        coeffs[m % n_alpha, n % n_beta] = f
    return np.fft.ifft2(coeffs, axes=(0, 1)) * (n_alpha * n_beta)
