"""Grids, sampled functions, and the special functions used by the eigenfunctions.

Units are natural throughout (hbar = 2m = 1), so H = -d^2/dx^2 + V.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateRecurrenceError, GridError

__all__ = [
    "Grid",
    "GridFunction",
    "jacobi_poly",
    "jacobi_series",
    "gudermannian",
    "log_cosh",
]

_DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D grid ``x_min, x_min + h, ..., x_max``."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 3:
            raise GridError(f"n_points must be an integer >= 3, got {self.n_points}")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise GridError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise GridError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")

    @classmethod
    def symmetric(cls, half_width: float, n_points: int) -> "Grid":
        """Grid on ``[-half_width, half_width]``; ``n_points`` must be odd."""
        if n_points % 2 == 0:
            raise GridError("symmetric grid needs an odd number of points")
        return cls(-float(half_width), float(half_width), int(n_points))

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def is_symmetric(self) -> bool:
        return self.x_min == -self.x_max and self.n_points % 2 == 1

    @property
    def nodes(self) -> np.ndarray:
        x = np.linspace(self.x_min, self.x_max, self.n_points)
        if self.is_symmetric:
            # exact mirror symmetry so x <-> -x maps node to node bitwise
            x = 0.5 * (x - x[::-1])
        return x


@dataclass
class GridFunction:
    """Complex samples of W, V or psi on a grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n_points,):
            raise GridError(
                f"expected {self.grid.n_points} samples, got shape {self.values.shape}"
            )

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    def scaled(self) -> "GridFunction":
        """Copy rescaled so that ``max |values| == 1``."""
        peak = np.max(np.abs(self.values))
        if peak == 0 or not np.isfinite(peak):
            raise GridError("cannot normalize a zero or non-finite grid function")
        return GridFunction(self.grid, self.values / peak)


def gudermannian(x):
    """``atan(sinh(x))`` evaluated as ``2 atan(tanh(x / 2))``.

    The half-angle form never overflows and is odd bit-for-bit, since both
    ``tanh`` and ``atan`` are.
    """
    return 2.0 * np.arctan(np.tanh(0.5 * np.asarray(x, dtype=float)))


def log_cosh(x):
    """Overflow-safe ``log(cosh(x))`` for real ``x``."""
    ax = np.abs(np.asarray(x, dtype=float))
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


def jacobi_poly(n: int, a, b, z):
    """Jacobi polynomial ``P_n^(a,b)(z)`` by the three-term recurrence in degree.

    ``a``, ``b`` and ``z`` may be complex; ``z`` may be an array.

    Raises
    ------
    DegenerateRecurrenceError
        If a recurrence denominator ``2k (k+a+b) (2k+a+b-2)`` is within 1e-12 of zero.
    """
    if int(n) != n or n < 0:
        raise ValueError(f"degree must be a non-negative integer, got {n}")
    n = int(n)
    a = complex(a)
    b = complex(b)
    z = np.asarray(z, dtype=complex)
    p_prev = np.ones_like(z)
    if n == 0:
        return p_prev if p_prev.ndim else complex(p_prev)
    p = (a - b) / 2 + (a + b + 2) * z / 2
    for k in range(2, n + 1):
        s = 2 * k + a + b
        denom = 2 * k * (k + a + b) * (s - 2)
        if abs(denom) <= _DEGENERATE_TOL:
            raise DegenerateRecurrenceError(
                f"degenerate Jacobi recurrence at degree {k} for a={a}, b={b}"
            )
        c1 = (s - 1) * (s * (s - 2) * z + a * a - b * b)
        c2 = 2 * (k + a - 1) * (k + b - 1) * s
        p, p_prev = (c1 * p - c2 * p_prev) / denom, p
    return p if p.ndim else complex(p)


def _gen_binom(top, k: int):
    """Generalized binomial ``C(top, k)`` for complex ``top`` and integer ``k >= 0``."""
    out = 1.0 + 0.0j
    for j in range(k):
        out *= (top - j) / (j + 1)
    return out


def jacobi_series(n: int, a, b, z):
    """Terminating-sum form of ``P_n^(a,b)(z)``.

    ``sum_s C(n+a, n-s) C(n+b, s) ((z-1)/2)^s ((z+1)/2)^(n-s)``; valid for all
    complex indices, so it is the fallback when the recurrence degenerates.
    """
    if int(n) != n or n < 0:
        raise ValueError(f"degree must be a non-negative integer, got {n}")
    n = int(n)
    a = complex(a)
    b = complex(b)
    z = np.asarray(z, dtype=complex)
    zm = (z - 1) / 2
    zp = (z + 1) / 2
    total = np.zeros_like(z)
    for s in range(n + 1):
        total = total + _gen_binom(n + a, n - s) * _gen_binom(n + b, s) * zm**s * zp ** (n - s)
    return total if total.ndim else complex(total)
