"""Uniform grids on the torus T^d and on the truncated strip [-L, L] x T^(d-1).

All spatial derivatives in the package go through the centered stencils
defined here, so the solvers, the ansatz error terms and the norms agree on
what a discrete derivative is.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class TorusGrid:
    """Period-1 torus with n points per axis."""

    d: int
    n: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError(f"torus dimension must be 1, 2 or 3, got {self.d}")
        if self.n < 16 or self.n & (self.n - 1):
            raise DomainError(f"points per period must be a power of two >= 16, got {self.n}")

    @property
    def shape(self):
        return (self.n,) * self.d

    @property
    def spacing(self):
        return (1.0 / self.n,) * self.d

    @property
    def periodic(self):
        return (True,) * self.d

    @property
    def cell_volume(self) -> float:
        return (1.0 / self.n) ** self.d

    def axes(self):
        """1-d coordinate arrays x_j = j/n."""
        return [np.arange(self.n) / self.n for _ in range(self.d)]

    def mesh(self):
        return np.meshgrid(*self.axes(), indexing="ij")

    def weights(self):
        return np.full(self.shape, self.cell_volume)


@dataclass(frozen=True)
class StripGrid:
    """[-L, L] along x1 (2K+1 nodes, spacing 1/n) times a period-1 torus transversally.

    The x1 spacing equals the transverse torus spacing so torus fields extend
    periodically onto the strip by index arithmetic.
    """

    d: int
    n: int
    K: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError(f"strip dimension must be 1, 2 or 3, got {self.d}")
        if self.n < 16 or self.n & (self.n - 1):
            raise DomainError(f"points per period must be a power of two >= 16, got {self.n}")
        if self.K < 4:
            raise DomainError("strip too short")

    @classmethod
    def covering(cls, d: int, n: int, half_length: float) -> "StripGrid":
        """Smallest aligned strip with L >= half_length."""
        return cls(d, n, int(math.ceil(half_length * n - 1e-9)))

    @property
    def L(self) -> float:
        return self.K / self.n

    @property
    def n1(self) -> int:
        return 2 * self.K + 1

    @property
    def dx1(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self):
        return (self.n1,) + (self.n,) * (self.d - 1)

    @property
    def spacing(self):
        return (1.0 / self.n,) * self.d

    @property
    def periodic(self):
        return (False,) + (True,) * (self.d - 1)

    @property
    def transverse(self) -> TorusGrid | None:
        return TorusGrid(self.d - 1, self.n) if self.d > 1 else None

    def x1(self):
        return (np.arange(self.n1) - self.K) / self.n

    def axes(self):
        return [self.x1()] + [np.arange(self.n) / self.n for _ in range(self.d - 1)]

    def mesh(self):
        return np.meshgrid(*self.axes(), indexing="ij")

    def torus_index(self):
        """Index into a period-1 torus axis for each strip x1 node."""
        return (np.arange(self.n1) - self.K) % self.n

    def weights(self, trim: int = 0):
        """Trapezoid weights along x1 (rows [trim, n1-trim)), midpoint transversally."""
        m = self.n1 - 2 * trim
        w1 = np.full(m, self.dx1)
        w1[0] *= 0.5
        w1[-1] *= 0.5
        w = w1.reshape((m,) + (1,) * (self.d - 1)) * (1.0 / self.n) ** (self.d - 1)
        return np.broadcast_to(w, (m,) + (self.n,) * (self.d - 1))

    def column(self, profile):
        """Reshape a 1-d x1 profile to broadcast against strip fields."""
        return np.asarray(profile).reshape((self.n1,) + (1,) * (self.d - 1))


def extend_to_strip(field, strip: StripGrid, lead: int = 0):
    """Periodic extension of a torus field (trailing d axes) onto the strip."""
    return np.take(field, strip.torus_index(), axis=lead)


# -- stencils ---------------------------------------------------------------
# Periodic wrap via np.roll along every axis; on the strip the first and last
# x1 rows of any derivative are garbage and must be trimmed by the caller.

def d1(f, axis, h):
    return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * h)


def d2(f, axis, h):
    return (np.roll(f, -1, axis=axis) - 2.0 * f + np.roll(f, 1, axis=axis)) / (h * h)


def dmix(f, a, b, ha, hb):
    return d1(d1(f, a, ha), b, hb)


def derivative(f, alpha, spacing, lead: int = 0):
    """Partial derivative with multi-index ``alpha`` (counts per spatial axis).

    Per-axis count 1 -> centered first difference, 2 -> compact second
    difference, 3 -> first difference of the compact second difference.
    ``lead`` is the number of leading non-spatial axes (vector components).
    """
    out = f
    for ax, c in enumerate(alpha):
        if c == 0:
            continue
        h = spacing[ax]
        axis = lead + ax
        if c == 1:
            out = d1(out, axis, h)
        elif c == 2:
            out = d2(out, axis, h)
        elif c == 3:
            out = d1(d2(out, axis, h), axis, h)
        else:
            raise DomainError("stencils support per-axis order <= 3")
    return out


def multi_indices(d: int, order: int):
    """All multi-indices of total order exactly ``order`` in d variables."""
    return [a for a in product(range(order + 1), repeat=d) if sum(a) == order]


def stencil_width(alpha) -> int:
    return sum({0: 0, 1: 1, 2: 1, 3: 2}[c] for c in alpha[:1])
