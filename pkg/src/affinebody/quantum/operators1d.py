"""One-dimensional weighted Sturm-Liouville operators and their spectra.

An operator ``H f = -c (1/w) (w f')' + V f`` on ``(a, b)`` is discretized on
the cell-centred grid ``x_i = a + (i - 1/2) h`` in flux form.  The modified
amplitude ``w^{1/2} f`` turns the weighted problem into an ordinary
symmetric tridiagonal matrix, so eigenvalues come from a tridiagonal solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from ..errors import DomainError, Unconverged

BOUNDARIES = ("dirichlet", "regular")
CONVERGENCE_RTOL = 1e-3
MIN_POINTS = 16


@dataclass(frozen=True, eq=False)
class ReducedOperator1D:
    """``-c (1/w) d/dx (w d/dx) + V`` on an interval.

    ``left`` and ``right`` select the boundary treatment: ``"dirichlet"``
    pins the amplitude to zero at the end, ``"regular"`` imposes zero
    weighted flux (the natural condition where the weight vanishes).
    """

    variable: str
    coefficient: float
    weight: Callable[[np.ndarray], np.ndarray]
    potential: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float]
    left: str = "regular"
    right: str = "dirichlet"
    threshold: float = np.inf
    label: dict = field(default_factory=dict)

    def __post_init__(self):
        a, b = self.domain
        if not (np.isfinite(a) and np.isfinite(b) and b > a):
            raise DomainError(f"invalid domain {self.domain}")
        for side in (self.left, self.right):
            if side not in BOUNDARIES:
                raise DomainError(f"boundary must be one of {BOUNDARIES}, got {side!r}")
        if not self.coefficient > 0:
            raise DomainError("kinetic coefficient must be positive")

    def with_potential(self, extra: Callable[[np.ndarray], np.ndarray]) -> "ReducedOperator1D":
        base = self.potential
        return ReducedOperator1D(
            self.variable, self.coefficient, self.weight,
            lambda x: base(x) + extra(x), self.domain, self.left, self.right,
            np.inf, dict(self.label),
        )

    def with_domain(self, domain: tuple[float, float]) -> "ReducedOperator1D":
        return ReducedOperator1D(
            self.variable, self.coefficient, self.weight, self.potential,
            domain, self.left, self.right, self.threshold, dict(self.label),
        )


@dataclass(frozen=True, eq=False)
class Discretization1D:
    """Symmetric tridiagonal form ``(diag, offdiag)`` on nodes ``x`` with weights ``w``."""

    x: np.ndarray
    h: float
    w: np.ndarray
    diag: np.ndarray
    offdiag: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def apply_symmetric(self, g: np.ndarray) -> np.ndarray:
        out = self.diag * g
        out[:-1] += self.offdiag * g[1:]
        out[1:] += self.offdiag * g[:-1]
        return out

    def apply(self, f: np.ndarray) -> np.ndarray:
        """Act on an ordinary (unmodified) amplitude: ``w^{-1/2} H~ w^{1/2} f``."""
        r = np.sqrt(self.w)
        return self.apply_symmetric(r * f) / r

    def eigenvalues(self, k: Optional[int] = None) -> np.ndarray:
        if k is None:
            return eigh_tridiagonal(self.diag, self.offdiag, eigvals_only=True)
        k = min(k, self.diag.size)
        return eigh_tridiagonal(self.diag, self.offdiag, eigvals_only=True, select="i", select_range=(0, k - 1))

    def eigenpairs(self, k: int):
        """Lowest ``k`` eigenvalues and amplitudes normalized in the weighted product."""
        k = min(k, self.diag.size)
        vals, vecs = eigh_tridiagonal(self.diag, self.offdiag, select="i", select_range=(0, k - 1))
        f = vecs / np.sqrt(self.w)[:, None] / np.sqrt(self.h)
        return vals, f


def discretize_1d(op: ReducedOperator1D, N: int) -> Discretization1D:
    if N < MIN_POINTS:
        raise DomainError(f"need at least {MIN_POINTS} grid points, got {N}")
    a, b = op.domain
    h = (b - a) / N
    x = a + (np.arange(N) + 0.5) * h
    faces = a + np.arange(N + 1) * h
    with np.errstate(all="ignore"):
        w = np.asarray(op.weight(x), dtype=float) * np.ones(N)
        wf = np.abs(np.asarray(op.weight(faces), dtype=float) * np.ones(N + 1))
        V = np.asarray(op.potential(x), dtype=float) * np.ones(N)
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise DomainError("weight must be finite and positive inside the domain")
    if not np.all(np.isfinite(V)):
        raise DomainError("potential is not finite on the grid")
    wf = np.where(np.isfinite(wf), wf, 0.0)
    c = op.coefficient / h ** 2
    # end faces: zero flux unless pinned; a Dirichlet ghost doubles the face flux
    left_flux = 2.0 * wf[0] if op.left == "dirichlet" else 0.0
    right_flux = 2.0 * wf[-1] if op.right == "dirichlet" else 0.0
    inner = wf[1:-1]
    diag = V.copy()
    diag[:-1] += c * inner / w[:-1]
    diag[1:] += c * inner / w[1:]
    diag[0] += c * left_flux / w[0]
    diag[-1] += c * right_flux / w[-1]
    off = -c * inner / np.sqrt(w[:-1] * w[1:])
    return Discretization1D(x=x, h=h, w=w, diag=diag, offdiag=off)


@dataclass
class Spectrum:
    """Ascending eigenvalues with labels, convergence flags and solver metadata."""

    eigenvalues: np.ndarray
    labels: list = field(default_factory=list)
    converged: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        if self.eigenvalues.size and np.any(np.diff(self.eigenvalues) < 0):
            order = np.argsort(self.eigenvalues, kind="stable")
            self.eigenvalues = self.eigenvalues[order]
            if self.labels:
                self.labels = [self.labels[i] for i in order]
            if self.converged.size:
                self.converged = self.converged[order]
        if not self.converged.size:
            self.converged = np.ones(self.eigenvalues.size, dtype=bool)

    def __len__(self) -> int:
        return self.eigenvalues.size


def _relative_change(coarse, fine, reference=None):
    scale = np.abs(fine) if reference is None else np.abs(reference - fine)
    return np.abs(fine - coarse) / np.maximum(scale, 1e-300)


def solve_1d(
    op: ReducedOperator1D,
    N: int = 2000,
    k: int = 5,
    *,
    rtol: float = CONVERGENCE_RTOL,
    max_points: int = 64_000,
    below_threshold: bool = False,
    strict: bool = False,
) -> Spectrum:
    """Lowest levels of ``op`` with an N-versus-2N convergence certificate.

    The grid is doubled until every requested level changes by at most
    ``rtol`` (relative) or ``max_points`` is reached.  With
    ``below_threshold`` only levels under ``op.threshold`` are kept and
    their binding energies ``threshold - E`` carry the certificate.
    ``strict`` raises :class:`Unconverged` instead of flagging.
    """
    ref = op.threshold if below_threshold else None
    coarse = discretize_1d(op, N).eigenvalues(k)
    n = N
    while True:
        n *= 2
        fine = discretize_1d(op, n).eigenvalues(k)
        if below_threshold:
            keep_c = coarse[coarse < op.threshold]
            keep_f = fine[fine < op.threshold]
            same = keep_c.size == keep_f.size
            if same:
                change = _relative_change(keep_c, keep_f, ref)
                ok = change <= rtol
            else:
                ok = np.zeros(keep_f.size, dtype=bool)
                change = np.full(keep_f.size, np.inf)
            levels = keep_f
        else:
            change = _relative_change(coarse, fine)
            ok = change <= rtol
            levels = fine
        if (np.all(ok) and (not below_threshold or same)) or 2 * n > max_points:
            break
        coarse = fine
    if strict and (not np.all(ok) or (below_threshold and not same)):
        raise Unconverged(f"levels of {op.variable} operator did not converge to {rtol} by N = {n}")
    return Spectrum(
        eigenvalues=levels,
        labels=[dict(op.label, k=i) for i in range(levels.size)],
        converged=np.asarray(ok, dtype=bool),
        metadata={
            "variable": op.variable,
            "N": n,
            "domain": list(op.domain),
            "rtol": rtol,
            "max_change": float(np.max(change)) if np.size(change) else 0.0,
        },
    )


# ---------------------------------------------------------------------------
# analytic reference spectra
# ---------------------------------------------------------------------------

def box_levels(coefficient: float, length: float, k: int) -> np.ndarray:
    """``-c f''`` with Dirichlet ends: ``c (pi n / L)^2``, ``n = 1..k``."""
    return coefficient * (np.pi * np.arange(1, k + 1) / length) ** 2


def oscillator_levels(coefficient: float, kappa: float, k: int, hbar: float = 1.0) -> np.ndarray:
    """``-c f'' + (kappa/2) x^2`` with ``c = hbar^2/(2M)``: ``hbar w (k + 1/2)``, ``w = sqrt(kappa/M)``."""
    mass = hbar ** 2 / (2 * coefficient)
    return hbar * np.sqrt(kappa / mass) * (np.arange(k) + 0.5)


def radial_oscillator_levels(nu: float, Omega: float, k: int, hbar: float = 1.0) -> np.ndarray:
    """Planar radial oscillator with effective angular momentum ``nu``: ``hbar Omega (2k + 1 + nu)``."""
    return hbar * Omega * (2 * np.arange(k) + 1 + nu)


def poschl_teller_shear_levels(m: int, n: int, coefficient: float) -> np.ndarray:
    """Exact bound levels of the geodetic planar shear channel.

    With ``f = (sh x)^{-1/2} g`` the channel becomes a hyperbolic
    Poschl-Teller problem whose levels are
    ``(c/4) [1 - (l_plus - l_minus - 1 - 2k)^2]`` for
    ``l_plus - l_minus - 1 - 2k > 0``, where ``l_pm = |n +- m|/2``.
    """
    lp = abs(n + m) / 2.0
    lm = abs(n - m) / 2.0
    out = []
    k = 0
    while lp - lm - 1 - 2 * k > 0:
        out.append(0.25 * coefficient * (1 - (lp - lm - 1 - 2 * k) ** 2))
        k += 1
    return np.array(out)


def grid_points(op: ReducedOperator1D, N: int) -> np.ndarray:
    a, b = op.domain
    return a + (np.arange(N) + 0.5) * (b - a) / N


def level_table(spectra: Sequence[Spectrum]) -> np.ndarray:
    return np.sort(np.concatenate([s.eigenvalues for s in spectra]))
