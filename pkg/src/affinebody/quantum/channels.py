"""Representation channels labelling reduced amplitudes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import InvalidLabel
from .wigner import as_half_integer


@dataclass(frozen=True)
class Channel2D:
    """Fourier labels of ``exp(i m alpha) exp(i n beta)`` for a planar body."""

    m: int
    n: int

    def __post_init__(self):
        for name in ("m", "n"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise InvalidLabel(f"planar channel label {name}={v!r} must be an integer")
            object.__setattr__(self, name, int(v))

    @property
    def m_hat(self) -> int:
        return self.n - self.m

    @property
    def n_hat(self) -> int:
        return self.n + self.m

    def swapped(self) -> "Channel2D":
        return Channel2D(self.n, self.m)

    def negated(self) -> "Channel2D":
        return Channel2D(-self.m, -self.n)


@dataclass(frozen=True)
class Channel3D:
    """Spin labels ``(s, j)`` of the left and right rotation factors.

    Both labels must be integers or both half-odd: a single-valued
    amplitude on the linear group cannot mix the two.
    """

    s: Fraction
    j: Fraction

    def __post_init__(self):
        s = as_half_integer(self.s)
        j = as_half_integer(self.j)
        if (2 * s) % 2 != (2 * j) % 2:
            raise InvalidLabel(f"labels s={s} and j={j} differ in halfness")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "j", j)

    @property
    def dims(self) -> tuple[int, int]:
        return int(2 * self.s + 1), int(2 * self.j + 1)

    def __str__(self) -> str:
        return f"({self.s},{self.j})"
