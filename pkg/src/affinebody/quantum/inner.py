"""Weighted scalar product of reduced amplitudes."""

from __future__ import annotations

from typing import Mapping, Sequence, Union

import numpy as np

from ..errors import ShapeError

Amplitude = Union[np.ndarray, Mapping]


def _quadrature_weights(n: int, h: float, rule: str) -> np.ndarray:
    q = np.full(n, h)
    if rule == "trapezoid":
        q[0] *= 0.5
        q[-1] *= 0.5
    elif rule != "midpoint":
        raise ValueError(f"unknown quadrature rule {rule!r}")
    return q


def _channel_product(f1, f2, weight, spacing, rule) -> complex:
    f1 = np.asarray(f1)
    f2 = np.asarray(f2)
    if f1.shape != f2.shape:
        raise ShapeError(f"amplitude shapes differ: {f1.shape} vs {f2.shape}")
    grid = weight.shape
    if f1.shape[: len(grid)] != grid:
        raise ShapeError(f"amplitude shape {f1.shape} does not start with grid shape {grid}")
    extra = f1.shape[len(grid):]
    if extra == ():
        dims = 1
        density = np.conj(f1) * f2
    elif len(extra) == 2:
        dims = extra[0] * extra[1]
        # Tr(f1^+ f2) = sum over both matrix indices of conj(f1) f2
        density = np.sum(np.conj(f1) * f2, axis=(-2, -1))
    else:
        raise ShapeError(f"amplitudes must be scalar or matrix valued on the grid, got trailing shape {extra}")
    density = density * weight
    for axis, (n, h) in enumerate(zip(grid, spacing)):
        q = _quadrature_weights(n, h, rule)
        density = np.tensordot(q, density, axes=([0], [0]))
    return complex(density) / dims


def weighted_inner_product(
    f1: Amplitude,
    f2: Amplitude,
    weight: np.ndarray,
    spacing: Union[float, Sequence[float]],
    rule: str = "trapezoid",
) -> complex:
    """``sum_channels (1/(N_alpha N_beta)) integral Tr(f1^+ f2) P dq``.

    Amplitudes are arrays on the grid of ``weight`` (scalar channels) or
    carry two trailing matrix indices whose sizes are the representation
    dimensions.  Mappings from channel labels to amplitudes are summed over
    their common channels; the channel sets must agree.  ``rule`` is
    ``"trapezoid"`` for node grids that include the ends and ``"midpoint"``
    for cell-centred grids.
    """
    weight = np.asarray(weight, dtype=float)
    spacing = tuple(np.broadcast_to(np.asarray(spacing, dtype=float), (weight.ndim,)))
    if isinstance(f1, Mapping) or isinstance(f2, Mapping):
        if not (isinstance(f1, Mapping) and isinstance(f2, Mapping)):
            raise ShapeError("both amplitudes must be channel maps or both arrays")
        if set(f1) != set(f2):
            raise ShapeError(f"channel sets differ: {sorted(map(str, set(f1) ^ set(f2)))}")
        return sum((_channel_product(f1[c], f2[c], weight, spacing, rule) for c in f1), 0j)
    return _channel_product(f1, f2, weight, spacing, rule)
