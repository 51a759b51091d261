"""Reduced kinetic operators of a three-dimensional body in a spin channel ``(s, j)``.

Amplitudes are ``(2s+1) x (2j+1)`` matrices on a uniform grid over the
Weyl chamber ``q1 < q2 < q3`` (or ``Q1 < Q2 < Q3`` for the d'Alembert
model).  Grid nodes on coincidence planes are masked and, like the nodes
outside the box, act as homogeneous Dirichlet data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from ..errors import InvalidModel
from ..geometry import measure_weights
from ..models import InertiaModel
from .channels import Channel3D
from .inner import weighted_inner_product
from .wigner import angular_momentum_matrices

# cyclic pairs (b, c) complementary to each axis a
_PAIRS = ((1, 2), (2, 0), (0, 1))


def interior_axis(lo: float, hi: float, N: int) -> np.ndarray:
    """``N`` interior nodes of ``[lo, hi]``; the ends carry Dirichlet data."""
    h = (hi - lo) / (N + 1)
    return lo + h * np.arange(1, N + 1)


def _mesh(axis):
    return np.meshgrid(axis, axis, axis, indexing="ij")


def _haar(q1, q2, q3):
    return measure_weights(np.stack([q1, q2, q3], axis=-1), kind="haar")


def _lebesgue(Q1, Q2, Q3):
    return measure_weights(np.stack([Q1, Q2, Q3], axis=-1), kind="lebesgue")


@dataclass(eq=False)
class ReducedOperator3D:
    channel: Channel3D
    kind: str
    axis: np.ndarray
    h: float
    weight: np.ndarray            # measure density on the nodes
    mask: np.ndarray              # active nodes (strict chamber interior)
    face_weight: tuple            # measure density on faces, one array per axis
    c_lap: float                  # coefficient of -(1/P) div(P grad)
    c_dil: float                  # coefficient of -(d1 + d2 + d3)^2
    left_sq: tuple                # per axis a: coefficient of (S_a^2 f - 2 S_a f S'_a + f S'_a^2)
    right_sq: tuple               # per axis a: coefficient of (S_a^2 f + 2 S_a f S'_a + f S'_a^2)
    S: tuple
    Sp: tuple
    potential: np.ndarray
    shift: float = 0.0

    @property
    def shape(self) -> tuple:
        n = self.axis.size
        return (n, n, n) + self.channel.dims

    @property
    def n_active(self) -> int:
        return int(self.mask.sum())

    # -- matrix-free action ------------------------------------------------
    def apply(self, F: np.ndarray) -> np.ndarray:
        F = np.asarray(F, dtype=complex)
        if F.shape != self.shape:
            raise ValueError(f"amplitude shape {F.shape} does not match {self.shape}")
        m = self.mask[..., None, None]
        F = np.where(m, F, 0.0)
        N = self.axis.size
        Fp = np.zeros((N + 2,) * 3 + self.channel.dims, dtype=complex)
        Fp[1:-1, 1:-1, 1:-1] = F
        core = (slice(1, -1),) * 3
        out = np.zeros_like(F)
        P = self.weight[..., None, None]
        for a in range(3):
            hi = list(core)
            lo = list(core)
            hi[a] = slice(2, None)
            lo[a] = slice(0, -2)
            w = self.face_weight[a]
            idx_hi = [slice(None)] * 3
            idx_lo = [slice(None)] * 3
            idx_hi[a] = slice(1, None)
            idx_lo[a] = slice(0, -1)
            w_hi = w[tuple(idx_hi)][..., None, None]
            w_lo = w[tuple(idx_lo)][..., None, None]
            flux = w_hi * (Fp[tuple(hi)] - F) - w_lo * (F - Fp[tuple(lo)])
            with np.errstate(divide="ignore", invalid="ignore"):
                out -= self.c_lap * np.where(m, flux / P, 0.0) / self.h ** 2
        if self.c_dil:
            up = Fp[2:, 2:, 2:]
            down = Fp[:-2, :-2, :-2]
            out -= self.c_dil * (up - 2 * F + down) / self.h ** 2
        for a in range(3):
            S, Sp = self.S[a], self.Sp[a]
            SS = S @ S
            SpSp = Sp @ Sp
            lhs = np.einsum("ik,...kl->...il", SS, F) + np.einsum("...ik,kl->...il", F, SpSp)
            mix = 2.0 * np.einsum("ik,...kl,lj->...ij", S, F, Sp)
            out += self.left_sq[a][..., None, None] * (lhs - mix)
            out += self.right_sq[a][..., None, None] * (lhs + mix)
        out += (self.potential + self.shift)[..., None, None] * F
        return np.where(m, out, 0.0)

    # -- assembled forms ---------------------------------------------------
    def _scalar_matrix(self) -> sp.csr_matrix:
        """Scalar part on active nodes, acting on node values."""
        N = self.axis.size
        idx = -np.ones((N, N, N), dtype=np.int64)
        idx[self.mask] = np.arange(self.n_active)
        rows, cols, vals = [], [], []
        P = self.weight
        act = np.argwhere(self.mask)
        diag = np.zeros(self.n_active)
        for a in range(3):
            w = self.face_weight[a]
            for step, face_off in ((1, 1), (-1, 0)):
                nb = act.copy()
                nb[:, a] += step
                face = act.copy()
                face[:, a] += face_off
                wf = w[tuple(face.T)]
                coef = self.c_lap * wf / (P[tuple(act.T)] * self.h ** 2)
                diag += coef
                inside = (nb[:, a] >= 0) & (nb[:, a] < N)
                j = np.full(len(act), -1)
                j[inside] = idx[tuple(nb[inside].T)]
                ok = j >= 0
                rows.append(idx[tuple(act[ok].T)])
                cols.append(j[ok])
                vals.append(-coef[ok])
        if self.c_dil:
            diag += 2 * self.c_dil / self.h ** 2
            for step in (1, -1):
                nb = act + step
                inside = np.all((nb >= 0) & (nb < N), axis=1)
                j = np.full(len(act), -1)
                j[inside] = idx[tuple(nb[inside].T)]
                ok = j >= 0
                rows.append(idx[tuple(act[ok].T)])
                cols.append(j[ok])
                vals.append(np.full(ok.sum(), -self.c_dil / self.h ** 2))
        diag += (self.potential + self.shift)[self.mask]
        rows.append(np.arange(self.n_active))
        cols.append(np.arange(self.n_active))
        vals.append(diag)
        n = self.n_active
        return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))

    def matrix(self) -> sp.csr_matrix:
        """Sparse matrix on active nodes; unknowns are node-major, row-major in the amplitude."""
        ds, dj = self.channel.dims
        d = ds * dj
        M = sp.kron(self._scalar_matrix(), sp.identity(d, format="csr"), format="csr").astype(complex)
        Is = np.eye(ds)
        Ij = np.eye(dj)
        for a in range(3):
            S, Sp = self.S[a], self.Sp[a]
            lhs = np.kron(S @ S, Ij) + np.kron(Is, (Sp @ Sp).T)
            mix = 2.0 * np.kron(S, Sp.T)
            M = M + sp.kron(sp.diags(self.left_sq[a][self.mask]), sp.csr_matrix(lhs - mix))
            M = M + sp.kron(sp.diags(self.right_sq[a][self.mask]), sp.csr_matrix(lhs + mix))
        return M.tocsr()

    def symmetric_matrix(self) -> sp.csr_matrix:
        """``P^{1/2} H P^{-1/2}``: Hermitian in the plain Euclidean product."""
        d = int(np.prod(self.channel.dims))
        r = np.repeat(np.sqrt(self.weight[self.mask]), d)
        return (sp.diags(r) @ self.matrix() @ sp.diags(1.0 / r)).tocsr()

    def lowest(self, k: int = 4, dense_limit: int = 6000) -> np.ndarray:
        H = self.symmetric_matrix()
        H = 0.5 * (H + H.conj().T)
        if H.shape[0] <= dense_limit:
            return np.linalg.eigvalsh(H.toarray())[:k]
        vals = eigsh(H, k=k, which="SA", return_eigenvectors=False)
        return np.sort(vals.real)

    def to_vector(self, F: np.ndarray) -> np.ndarray:
        return np.asarray(F)[self.mask].reshape(-1)

    def from_vector(self, v: np.ndarray) -> np.ndarray:
        F = np.zeros(self.shape, dtype=complex)
        F[self.mask] = np.asarray(v).reshape((self.n_active,) + self.channel.dims)
        return F

    def inner(self, F1: np.ndarray, F2: np.ndarray) -> complex:
        """Weighted product with the measure density on active nodes."""
        return weighted_inner_product(F1, F2, np.where(self.mask, self.weight, 0.0), self.h, rule="midpoint")

    def hermiticity_residual(self, F1: np.ndarray, F2: np.ndarray) -> float:
        a = self.inner(F1, self.apply(F2))
        b = np.conj(self.inner(F2, self.apply(F1)))
        return float(abs(a - b) / max(abs(a), abs(b), 1e-300))


def reduced_kinetic_3d(
    model: InertiaModel,
    s,
    j,
    axis: Optional[np.ndarray] = None,
    *,
    hbar: float = 1.0,
    potential: Optional[Callable] = None,
    coincidence_tol: float = 1e-12,
) -> ReducedOperator3D:
    """Assemble the reduced kinetic operator of channel ``(s, j)``.

    Invariant models use the logarithmic invariants ``q`` with the Haar
    density; the isotropic d'Alembert model uses the stretches ``Q`` with
    the Lebesgue density.  ``potential(x1, x2, x3)`` is evaluated on the
    same variables.
    """
    if model.n != 3:
        raise InvalidModel("the three-dimensional reduction needs n = 3")
    ch = Channel3D(s, j)
    S = tuple(angular_momentum_matrices(ch.s, hbar))
    Sp = tuple(angular_momentum_matrices(ch.j, hbar))
    if axis is None:
        axis = interior_axis(0.05, 3.0, 12) if model.kind == "DAlembert" else interior_axis(-2.0, 2.0, 12)
    axis = np.asarray(axis, dtype=float)
    if axis.size < 3 or np.any(np.diff(axis) <= 0):
        raise ValueError("axis must be increasing with at least three nodes")
    h = float(axis[1] - axis[0])
    if not np.allclose(np.diff(axis), h, rtol=1e-10, atol=0):
        raise ValueError("axis must be uniform")
    X = _mesh(axis)
    mask = (X[1] - X[0] > coincidence_tol) & (X[2] - X[1] > coincidence_tol)

    if model.kind == "DAlembert":
        if not model.is_isotropic_dalembert:
            raise InvalidModel("the reduced d'Alembert operator needs an isotropic inertial tensor")
        if axis[0] <= 0:
            raise ValueError("stretch grid must be positive")
        I = float(model.J[0, 0])
        wfun = _lebesgue
        c_lap = hbar ** 2 / (2 * I)
        c_dil = 0.0
        shift = 0.0
        left, right = [], []
        for b, c in _PAIRS:
            with np.errstate(divide="ignore"):
                left.append(np.where(mask, 1.0 / (4 * I * (X[b] - X[c]) ** 2), 0.0))
            right.append(np.where(mask, 1.0 / (4 * I * (X[b] + X[c]) ** 2), 0.0))
    else:
        wfun = _haar
        a = model.alpha
        c_lap = 0.5 * hbar ** 2 * model.inv_alpha
        c_dil = 0.5 * hbar ** 2 * model.inv_beta
        if model.kind == "MetricAffine":
            shift = 0.5 * model.inv_mu * hbar ** 2 * float(ch.s * (ch.s + 1))
        elif model.kind == "AffineMetric":
            shift = 0.5 * model.inv_mu * hbar ** 2 * float(ch.j * (ch.j + 1))
        else:
            shift = 0.0
        left, right = [], []
        for b, c in _PAIRS:
            half = 0.5 * (X[b] - X[c])
            with np.errstate(divide="ignore"):
                left.append(np.where(mask, 1.0 / (16 * a * np.sinh(half) ** 2), 0.0))
            right.append(np.where(mask, -1.0 / (16 * a * np.cosh(half) ** 2), 0.0))

    weight = np.abs(wfun(*X))
    faces = []
    ext = np.concatenate([[axis[0] - h], axis, [axis[-1] + h]])
    mid = 0.5 * (ext[:-1] + ext[1:])
    for ax in range(3):
        coords = [axis, axis, axis]
        coords[ax] = mid
        faces.append(np.abs(wfun(*np.meshgrid(*coords, indexing="ij"))))
    V = np.zeros_like(weight) if potential is None else np.asarray(potential(*X), dtype=float) * np.ones_like(weight)
    V = np.where(mask, V, 0.0)
    return ReducedOperator3D(
        channel=ch,
        kind=model.kind,
        axis=axis,
        h=h,
        weight=weight,
        mask=mask,
        face_weight=tuple(faces),
        c_lap=c_lap,
        c_dil=c_dil,
        left_sq=tuple(left),
        right_sq=tuple(right),
        S=S,
        Sp=Sp,
        potential=V,
        shift=shift,
    )
