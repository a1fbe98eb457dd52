"""Finite-difference calculus on uniform one-dimensional grids.

Two boundary modes are supported.  ``periodic`` grids exclude the right
endpoint (the interval length is ``n * dx``) and use wrap-around stencils.
``decaying`` grids include both endpoints and close the stencils with
one-sided formulas of the same order of accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InconsistentInput, RejectedInput

PERIODIC = "periodic"
DECAYING = "decaying"
ACCURACY_ORDER = {"second": 2, "fourth": 4}


@dataclass(frozen=True)
class Grid:
    x0: float
    dx: float
    n: int
    boundary: str = PERIODIC

    def __post_init__(self):
        if not self.dx > 0:
            raise RejectedInput(f"grid spacing must be positive, got dx={self.dx}")
        if self.n < 8:
            raise RejectedInput(f"grid needs at least 8 points, got n={self.n}")
        if self.boundary not in (PERIODIC, DECAYING):
            raise RejectedInput(f"unknown boundary mode {self.boundary!r}")

    @classmethod
    def periodic(cls, a: float, b: float, n: int) -> "Grid":
        """n points covering [a, b) with b identified with a."""
        return cls(a, (b - a) / n, n, PERIODIC)

    @classmethod
    def decaying(cls, a: float, b: float, n: int) -> "Grid":
        """n points covering the closed interval [a, b]."""
        return cls(a, (b - a) / (n - 1), n, DECAYING)

    @property
    def is_periodic(self) -> bool:
        return self.boundary == PERIODIC

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def length(self) -> float:
        return self.n * self.dx if self.is_periodic else (self.n - 1) * self.dx

    def refine(self, factor: int = 2) -> "Grid":
        """Same interval with the spacing divided by ``factor``."""
        if self.is_periodic:
            return Grid(self.x0, self.dx / factor, self.n * factor, PERIODIC)
        return Grid(self.x0, self.dx / factor, (self.n - 1) * factor + 1, DECAYING)

    def sample(self, func) -> "GridFunction":
        return GridFunction(self, func(self.x))


class GridFunction:
    """Immutable samples of a real field on a :class:`Grid`."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        arr = np.array(values, dtype=float)
        if arr.shape != (grid.n,):
            raise RejectedInput(f"expected {grid.n} values, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise RejectedInput("grid function contains non-finite values")
        arr.flags.writeable = False
        self.grid = grid
        self.values = arr

    def __repr__(self):
        return f"GridFunction(n={self.grid.n}, boundary={self.grid.boundary!r})"

    def __len__(self):
        return self.grid.n

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


# ---------------------------------------------------------------------------
# stencils

@lru_cache(maxsize=None)
def fd_weights(offsets: tuple, order: int) -> np.ndarray:
    """Fornberg weights for the ``order``-th derivative at offset 0."""
    z = np.asarray(offsets, dtype=float)
    n = len(z)
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, z[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, z[i]
        for j in range(i):
            c3 = z[i] - z[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    w = c[:, order].copy()
    w.flags.writeable = False
    return w


def _central_offsets(order: int, p: int) -> tuple:
    half = (order + 1) // 2 + p // 2 - 1
    return tuple(range(-half, half + 1))


def diff_array(values: np.ndarray, dx: float, order: int = 1, accuracy: str = "second",
               periodic: bool = True) -> np.ndarray:
    """Array-level derivative; see :func:`derivative`."""
    if order not in (1, 2, 3) or accuracy not in ACCURACY_ORDER:
        raise RejectedInput(f"unsupported derivative order={order!r} accuracy={accuracy!r}")
    p = ACCURACY_ORDER[accuracy]
    f = np.asarray(values, dtype=float)
    n = f.size
    offs = _central_offsets(order, p)
    w = fd_weights(offs, order)
    if periodic:
        out = np.zeros(n)
        for o, wk in zip(offs, w):
            if wk != 0.0:
                out += wk * np.roll(f, -o)
        return out / dx**order

    half = offs[-1]
    out = np.zeros(n)
    inner = slice(half, n - half)
    for o, wk in zip(offs, w):
        if wk != 0.0:
            out[inner] += wk * f[half + o:n - half + o]
    # one-sided closure with order + p nodes keeps the advertised accuracy
    npts = order + p
    for i in list(range(half)) + list(range(n - half, n)):
        start = min(max(i - npts // 2, 0), n - npts)
        nodes = tuple(range(start - i, start - i + npts))
        out[i] = fd_weights(nodes, order) @ f[start:start + npts]
    return out / dx**order


def derivative(f: GridFunction, order: int = 1, accuracy: str = "second") -> GridFunction:
    """Central finite-difference derivative of order 1, 2 or 3."""
    g = f.grid
    return f.with_values(diff_array(f.values, g.dx, order, accuracy, g.is_periodic))


def cumtrapz_array(values: np.ndarray, dx: float, fprime: np.ndarray | None = None) -> np.ndarray:
    """Cumulative trapezoid integral starting at 0.

    With ``fprime`` the Euler-Maclaurin end correction is applied, which
    raises the local accuracy from second to fourth order.
    """
    f = np.asarray(values, dtype=float)
    inc = 0.5 * dx * (f[1:] + f[:-1])
    if fprime is not None:
        inc -= dx**2 / 12.0 * (fprime[1:] - fprime[:-1])
    out = np.empty_like(f)
    out[0] = 0.0
    np.cumsum(inc, out=out[1:])
    return out


def antiderivative(f: GridFunction, convention: str = "anchored_left", accuracy: str = "second",
                   mean_tol: float = 1e-10) -> GridFunction:
    """Discrete inverse of d/dx.

    ``anchored_left`` fixes F(x0) = 0; ``zero_mean`` subtracts the mean of F.
    On a periodic grid the zero-mean convention needs a mean-free integrand,
    otherwise no periodic antiderivative exists.
    """
    if convention not in ("anchored_left", "zero_mean"):
        raise RejectedInput(f"unknown antiderivative convention {convention!r}")
    if accuracy not in ACCURACY_ORDER:
        raise RejectedInput(f"unsupported accuracy {accuracy!r}")
    g = f.grid
    vals = f.values
    if g.is_periodic and convention == "zero_mean":
        resid = float(np.mean(vals))
        scale = max(float(np.max(np.abs(vals))), np.finfo(float).tiny)
        if abs(resid) > mean_tol * scale:
            raise InconsistentInput(
                f"periodic antiderivative needs a mean-free integrand; residual mean {resid:.3e}")
    fp = diff_array(vals, g.dx, 1, "fourth", g.is_periodic) if accuracy == "fourth" else None
    F = cumtrapz_array(vals, g.dx, fp)
    if convention == "zero_mean":
        F = F - _mean(F, g)
    return f.with_values(F)


def _mean(values: np.ndarray, grid: Grid) -> float:
    if grid.is_periodic:
        return float(np.mean(values))
    return float(np.trapezoid(values, dx=grid.dx) / grid.length)


def integrate(f: GridFunction) -> float:
    """Total integral: rectangle sum on periodic grids, trapezoid otherwise."""
    g = f.grid
    if g.is_periodic:
        return float(np.sum(f.values) * g.dx)
    return float(np.trapezoid(f.values, dx=g.dx))
