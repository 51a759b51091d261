"""Spin matrices in the ``|j, m>`` basis built from ladder operators."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import InvalidLabel


def as_half_integer(value) -> Fraction:
    """Parse ``value`` as a non-negative multiple of 1/2 (accepts ``"1/2"``, ``0.5``, ``1``)."""
    try:
        frac = Fraction(value.strip()) if isinstance(value, str) else Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidLabel(f"cannot read {value!r} as a half-integer") from exc
    if frac < 0 or (2 * frac).denominator != 1:
        raise InvalidLabel(f"{value!r} is not a non-negative half-integer")
    return frac


@dataclass(frozen=True, eq=False)
class AngularMatrices:
    j: Fraction
    S1: np.ndarray
    S2: np.ndarray
    S3: np.ndarray

    @property
    def dim(self) -> int:
        return int(2 * self.j + 1)

    def __iter__(self):
        return iter((self.S1, self.S2, self.S3))

    def casimir(self) -> np.ndarray:
        return self.S1 @ self.S1 + self.S2 @ self.S2 + self.S3 @ self.S3


def angular_momentum_matrices(j, hbar: float = 1.0) -> AngularMatrices:
    """Hermitian ``S1, S2, S3`` with ``[S_a, S_b] = i hbar eps_abc S_c``.

    Basis order is ``m = j, j-1, ..., -j``.
    """
    j = as_half_integer(j)
    dim = int(2 * j + 1)
    m = float(j) - np.arange(dim)
    # <m+1| S+ |m> = hbar sqrt(j(j+1) - m(m+1))
    jj = float(j)
    raise_elems = hbar * np.sqrt(jj * (jj + 1) - m[1:] * (m[1:] + 1))
    Splus = np.diag(raise_elems, k=1).astype(complex)
    Sminus = Splus.conj().T
    S1 = 0.5 * (Splus + Sminus)
    S2 = -0.5j * (Splus - Sminus)
    S3 = np.diag(hbar * m).astype(complex)
    return AngularMatrices(j, S1, S2, S3)
