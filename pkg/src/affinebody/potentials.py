"""Doubly isotropic potentials.

Every potential here depends on the configuration only through the
deformation invariants, so its gradient with respect to ``phi`` follows from
``dV/dq`` by the singular-vector chain rule
``dq_a / dphi = L[:, a] R[:, a]^T / Q_a`` (identity metrics).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import MetricPair, spd_power


class Potential:
    """Base class: subclasses implement ``value_q`` and ``grad_q``."""

    kind = "None"
    #: the value depends on q only through the mean qbar
    dilatational_only = False

    def value_q(self, q: np.ndarray) -> float:
        return 0.0

    def grad_q(self, q: np.ndarray) -> np.ndarray:
        return np.zeros_like(q)

    # -- configuration-space interface -------------------------------------
    def value(self, x, phi, metrics: Optional[MetricPair] = None) -> float:
        phi_e = phi if metrics is None else metrics.to_euclidean(phi)
        s = np.linalg.svd(phi_e, compute_uv=False)[::-1]
        return float(self.value_q(np.log(s)))

    def gradient(self, x, phi, metrics: Optional[MetricPair] = None):
        """``(dV/dx, dV/dphi)``; the second is indexed like ``phi``."""
        n = phi.shape[0]
        if self.is_zero:
            return np.zeros(n), np.zeros((n, n))
        phi_e = phi if metrics is None else metrics.to_euclidean(phi)
        if self.dilatational_only:
            # q-bar = ln det(phi) / n, so d qbar / d phi = phi^{-T} / n
            q = np.full(n, np.log(abs(np.linalg.det(phi_e))) / n)
            dVdq = self.grad_q(q)
            dphi_e = np.sum(dVdq) / n * np.linalg.inv(phi_e).T
        else:
            U, s, Vt = np.linalg.svd(phi_e)
            dVdq = self.grad_q(np.log(s[::-1]))[::-1]
            dphi_e = (U * (dVdq / s)) @ Vt
        if metrics is not None and not metrics.is_euclidean:
            dphi_e = spd_power(metrics.g, 0.5) @ dphi_e @ spd_power(metrics.eta, -0.5)
        return np.zeros(n), dphi_e

    @property
    def is_zero(self) -> bool:
        return False

    def describe(self) -> dict:
        return {"kind": self.kind}


class NoPotential(Potential):
    @property
    def is_zero(self) -> bool:
        return True


@dataclass
class DilatationHarmonic(Potential):
    """``(kappa/2) (qbar - q0)^2``: a well for the mean logarithmic invariant."""

    kappa: float
    q0: float = 0.0
    kind = "DilatationHarmonic"
    dilatational_only = True

    def value_q(self, q):
        return 0.5 * self.kappa * (np.mean(q) - self.q0) ** 2

    def grad_q(self, q):
        return np.full_like(q, self.kappa * (np.mean(q) - self.q0) / q.size)

    def describe(self):
        return {"kind": self.kind, "kappa": self.kappa, "q0": self.q0}


#: building blocks for binary shear interactions f(x), x = q_a - q_b
_PAIR_BASIS: dict[str, tuple[Callable, Callable]] = {
    "x2": (lambda x: x ** 2, lambda x: 2 * x),
    "inv_sinh2": (lambda x: 1 / np.sinh(x / 2) ** 2, lambda x: -np.cosh(x / 2) / np.sinh(x / 2) ** 3),
    "inv_cosh2": (lambda x: 1 / np.cosh(x / 2) ** 2, lambda x: -np.sinh(x / 2) / np.cosh(x / 2) ** 3),
    "cosh": (np.cosh, np.sinh),
}


@dataclass
class BinaryShear(Potential):
    """``V_dil(qbar) + sum_{a != b} f(q_a - q_b)``.

    ``f`` is a linear combination of even basis functions given as
    ``{"x2": c1, "inv_sinh2": c2, ...}``; see ``_PAIR_BASIS`` for names.
    """

    terms: dict
    dilatation: Optional[DilatationHarmonic] = None
    kind = "BinaryShear"

    def __post_init__(self):
        unknown = set(self.terms) - set(_PAIR_BASIS)
        if unknown:
            raise ValueError(f"unknown pair basis functions {sorted(unknown)}; known: {sorted(_PAIR_BASIS)}")

    def _f(self, x):
        return sum(c * _PAIR_BASIS[k][0](x) for k, c in self.terms.items())

    def _df(self, x):
        return sum(c * _PAIR_BASIS[k][1](x) for k, c in self.terms.items())

    def value_q(self, q):
        d = q[:, None] - q[None, :]
        off = ~np.eye(q.size, dtype=bool)
        v = float(np.sum(self._f(d[off])))
        if self.dilatation is not None:
            v += self.dilatation.value_q(q)
        return v

    def grad_q(self, q):
        d = q[:, None] - q[None, :]
        df = np.where(np.eye(q.size, dtype=bool), 0.0, self._df(np.where(np.eye(q.size, dtype=bool), 1.0, d)))
        # f is even, so both orderings of a pair contribute f'(q_a - q_b)
        grad = 2.0 * np.sum(df, axis=1)
        if self.dilatation is not None:
            grad = grad + self.dilatation.grad_q(q)
        return grad

    def describe(self):
        out = {"kind": self.kind, "terms": dict(self.terms)}
        if self.dilatation is not None:
            out["dilatation"] = self.dilatation.describe()
        return out


@dataclass
class TwoDimPreset(Potential):
    """Planar preset ``(kappa_q/2) qbar^2 + (kappa_x/2) x^2`` with ``x = q2 - q1``."""

    kappa_q: float = 0.0
    kappa_x: float = 0.0
    kind = "TwoDimPreset"

    def value_q(self, q):
        if q.size != 2:
            raise ValueError("TwoDimPreset is defined for n = 2")
        return 0.5 * self.kappa_q * np.mean(q) ** 2 + 0.5 * self.kappa_x * (q[1] - q[0]) ** 2

    def grad_q(self, q):
        x = q[1] - q[0]
        return 0.5 * self.kappa_q * np.mean(q) * np.ones(2) + self.kappa_x * x * np.array([-1.0, 1.0])

    def describe(self):
        return {"kind": self.kind, "kappa_q": self.kappa_q, "kappa_x": self.kappa_x}


def qpm_coordinates(Q: Sequence[float]) -> tuple[float, float]:
    """``Q+ = (Q1 + Q2)/sqrt 2`` and ``Q- = (Q1 - Q2)/sqrt 2``."""
    return (Q[0] + Q[1]) / np.sqrt(2.0), (Q[0] - Q[1]) / np.sqrt(2.0)


@dataclass
class QpmFamily(Potential):
    """``a/Q+^2 + b/Q-^2 + c (Q+^2 + Q-^2)`` in the stretches ``Q = exp(q)`` (n = 2)."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    kind = "QpmFamily"

    def value_q(self, q):
        Q = np.exp(q)
        qp, qm = qpm_coordinates(Q)
        return self.a / qp ** 2 + self.b / qm ** 2 + self.c * (qp ** 2 + qm ** 2)

    def grad_q(self, q):
        Q = np.exp(q)
        qp, qm = qpm_coordinates(Q)
        r2 = np.sqrt(2.0)
        dV_dQ = np.array([
            -2 * self.a / qp ** 3 / r2 - 2 * self.b / qm ** 3 / r2 + 2 * self.c * Q[0],
            -2 * self.a / qp ** 3 / r2 + 2 * self.b / qm ** 3 / r2 + 2 * self.c * Q[1],
        ])
        return dV_dQ * Q

    def describe(self):
        return {"kind": self.kind, "a": self.a, "b": self.b, "c": self.c}


@dataclass
class PolarTrig(Potential):
    """Planar elastic preset ``2 kappa/(r^2 cos 2phi) + (kappa/2) r^2``.

    With ``Q+ = r cos phi`` and ``Q- = r sin phi`` this is
    ``kappa/(Q1 Q2) + (kappa/2)(Q1^2 + Q2^2)``: it diverges as the area
    ``det phi`` collapses and grows under large stretches.
    """

    kappa: float = 1.0
    kind = "PolarTrig"

    def value_q(self, q):
        Q = np.exp(q)
        return self.kappa / (Q[0] * Q[1]) + 0.5 * self.kappa * (Q[0] ** 2 + Q[1] ** 2)

    def grad_q(self, q):
        Q = np.exp(q)
        return -self.kappa / (Q[0] * Q[1]) * np.ones(2) + self.kappa * Q ** 2

    def describe(self):
        return {"kind": self.kind, "kappa": self.kappa}


def potential_from_spec(spec: Optional[dict]) -> Potential:
    """Build a potential from a plain mapping such as ``{"kind": "QpmFamily", "a": 1}``."""
    if not spec or spec.get("kind", "None") in ("None", None):
        return NoPotential()
    spec = dict(spec)
    kind = spec.pop("kind")
    if kind == "DilatationHarmonic":
        return DilatationHarmonic(**spec)
    if kind == "BinaryShear":
        dil = spec.pop("dilatation", None)
        return BinaryShear(terms=spec.pop("terms", {}), dilatation=DilatationHarmonic(**dil) if dil else None)
    if kind == "TwoDimPreset":
        return TwoDimPreset(**spec)
    if kind == "QpmFamily":
        return QpmFamily(**spec)
    if kind == "PolarTrig":
        return PolarTrig(**spec)
    raise ValueError(f"unknown potential kind {kind!r}")
