"""Discrete distributions on finite ordered grids.

A :class:`SupportGrid` is a Cartesian product of strictly increasing level
lists; its points are enumerated lexicographically (first dimension slowest,
the same order as :func:`itertools.product`). A :class:`DiscreteDistribution`
is a weight vector over those points.

The usual stochastic order compares masses of upper sets. On one-dimensional
grids this reduces to comparing CDFs; on small multi-dimensional grids every
upper set is enumerated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import DEFAULT

MAX_UPPER_SET_POINTS = 20


class GridError(ValueError):
    """A point or value is not representable on a grid."""


class GridTooLargeError(ValueError):
    """The grid is too large for exhaustive upper-set enumeration."""


class LatticeConstructionError(ArithmeticError):
    """Upper-rectangle max/min produced a negative point mass."""

    def __init__(self, message, masses=None):
        super().__init__(message)
        self.masses = masses


@dataclass(frozen=True)
class SupportGrid:
    """Cartesian product of strictly increasing real level lists."""

    dims: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        dims = tuple(tuple(float(v) for v in d) for d in self.dims)
        for k, levels in enumerate(dims):
            if not levels:
                raise GridError(f"dimension {k} has no levels")
            if any(b <= a for a, b in zip(levels, levels[1:])):
                raise GridError(f"levels of dimension {k} are not strictly increasing")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def line(cls, levels: Iterable[float]) -> SupportGrid:
        return cls((tuple(levels),))

    @classmethod
    def indices(cls, count: int) -> SupportGrid:
        """One-dimensional grid ``0, 1, ..., count - 1``."""
        return cls((tuple(range(count)),))

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(d) for d in self.dims)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=int))

    @cached_property
    def points(self) -> np.ndarray:
        """All points as an array of shape ``(size, ndim)``."""
        if self.ndim == 0:
            return np.zeros((1, 0))
        mesh = np.meshgrid(*[np.asarray(d) for d in self.dims], indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        pts.flags.writeable = False
        return pts

    @property
    def levels(self) -> np.ndarray:
        """Levels of a one-dimensional grid."""
        if self.ndim != 1:
            raise GridError("levels is only defined for one-dimensional grids")
        return np.asarray(self.dims[0])

    def point(self, index: int):
        p = self.points[index]
        return float(p[0]) if self.ndim == 1 else tuple(float(v) for v in p)

    def index_of(self, point, tol: float = 1e-12) -> int:
        coords = np.atleast_1d(np.asarray(point, dtype=float))
        if coords.shape != (self.ndim,):
            raise GridError(f"point {point!r} has wrong dimension for a {self.ndim}-D grid")
        idx = []
        for k, (c, levels) in enumerate(zip(coords, self.dims)):
            lv = np.asarray(levels)
            j = int(np.argmin(np.abs(lv - c)))
            if abs(lv[j] - c) > tol:
                raise GridError(f"value {c} is not a level of dimension {k}")
            idx.append(j)
        return int(np.ravel_multi_index(idx, self.shape)) if idx else 0

    def snap(self, values: np.ndarray, tol: float = DEFAULT.snap) -> np.ndarray:
        """Flat indices of the grid points nearest to ``values``.

        ``values`` has shape ``(m,)`` for 1-D grids or ``(m, ndim)``.
        """
        vals = np.asarray(values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.shape[1] != self.ndim:
            raise GridError("value dimension does not match the grid")
        multi = []
        for k, levels in enumerate(self.dims):
            lv = np.asarray(levels)
            v = vals[:, k]
            pos = np.clip(np.searchsorted(lv, v), 1, max(len(lv) - 1, 1))
            if len(lv) == 1:
                nearest = np.zeros(len(v), dtype=int)
            else:
                left, right = lv[pos - 1], lv[pos]
                nearest = np.where(np.abs(v - left) <= np.abs(right - v), pos - 1, pos)
            err = np.abs(lv[nearest] - v)
            if np.any(~(err <= tol)):
                bad = v[np.argmax(np.where(np.isnan(err), np.inf, err))]
                raise GridError(f"value {bad} is not within {tol} of a level of dimension {k}")
            multi.append(nearest)
        if not multi:
            return np.zeros(len(vals), dtype=int)
        return np.ravel_multi_index(multi, self.shape)

    def __len__(self):
        return self.size


def _as_weights(weights, size: int, tol: float) -> np.ndarray:
    w = np.array(weights, dtype=float).reshape(-1)
    if w.shape != (size,):
        raise ValueError(f"expected {size} weights, got {w.size}")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    if np.any(w < 0):
        raise ValueError(f"negative weight {w.min()}")
    total = w.sum()
    if abs(total - 1.0) > tol:
        raise ValueError(f"weights sum to {total!r}, not 1")
    w.flags.writeable = False
    return w


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Probability weights indexed by the points of a :class:`SupportGrid`."""

    grid: SupportGrid
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", _as_weights(self.weights, self.grid.size, DEFAULT.mass))

    @classmethod
    def uniform(cls, grid: SupportGrid) -> DiscreteDistribution:
        return cls(grid, np.full(grid.size, 1.0 / grid.size))

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    def mean(self) -> np.ndarray | float:
        """Expectation of the identity map (per coordinate)."""
        m = self.weights @ self.grid.points
        return float(m[0]) if self.grid.ndim == 1 else m

    def survival(self) -> np.ndarray:
        """Mass of every upper rectangle ``{y : y >= x}`` indexed like the grid."""
        arr = self.weights.reshape(self.grid.shape)
        for axis in range(arr.ndim):
            arr = np.flip(np.cumsum(np.flip(arr, axis), axis=axis), axis)
        return arr.ravel()

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.weights)

    def allclose(self, other: DiscreteDistribution, atol: float = 1e-12) -> bool:
        return self.grid == other.grid and np.allclose(self.weights, other.weights, rtol=0, atol=atol)

    def __repr__(self):
        return f"DiscreteDistribution(shape={self.grid.shape}, weights={np.round(self.weights, 6).tolist()})"


def dirac(grid: SupportGrid, point) -> DiscreteDistribution:
    w = np.zeros(grid.size)
    w[grid.index_of(point)] = 1.0
    return DiscreteDistribution(grid, w)


def mix(components: Sequence[tuple[float, DiscreteDistribution]]) -> DiscreteDistribution:
    """Convex combination of distributions sharing one grid."""
    if not components:
        raise ValueError("mix needs at least one component")
    coeffs = np.array([float(c) for c, _ in components])
    if np.any(coeffs < 0) or abs(coeffs.sum() - 1.0) > DEFAULT.mass:
        raise ValueError("mixing weights must be a probability vector")
    grid = components[0][1].grid
    if any(d.grid != grid for _, d in components):
        raise ValueError("mixed distributions must share one grid")
    w = coeffs @ np.stack([d.weights for _, d in components])
    return DiscreteDistribution(grid, w)


def product(dists: Sequence[DiscreteDistribution]) -> DiscreteDistribution:
    """Product measure on the concatenated grid, first factor slowest."""
    if not dists:
        raise ValueError("product of an empty list")
    grid = SupportGrid(tuple(itertools.chain.from_iterable(d.grid.dims for d in dists)))
    w = reduce(lambda acc, d: np.outer(acc, d.weights).ravel(), dists[1:], dists[0].weights)
    return DiscreteDistribution(grid, w)


def pushforward(
    dist: DiscreteDistribution,
    mapping: Callable | np.ndarray,
    target: SupportGrid,
) -> DiscreteDistribution:
    """Image measure of ``dist`` under ``mapping`` on the ``target`` grid.

    ``mapping`` is either a callable applied to each support point (scalars for
    1-D grids, tuples otherwise) or an array of image values aligned with the
    source grid's points. Images are snapped to the nearest target level when
    within the snapping tolerance; anything further away is an error.
    """
    if callable(mapping):
        images = np.zeros((dist.grid.size, target.ndim))
        for i in dist.support:
            images[i] = np.atleast_1d(np.asarray(mapping(dist.grid.point(i)), dtype=float))
    else:
        images = np.asarray(mapping, dtype=float).reshape(dist.grid.size, -1)
    supp = dist.support
    idx = target.snap(images[supp])
    w = np.bincount(idx, weights=dist.weights[supp], minlength=target.size)
    return DiscreteDistribution(target, w)


def expectation(dist: DiscreteDistribution, f: Callable | np.ndarray | None = None) -> float:
    """``sum f(x) * weight(x)``; ``f`` may be a callable, a value array, or None for identity on 1-D grids."""
    if f is None:
        return float(dist.weights @ dist.grid.levels)
    if callable(f):
        vals = np.array([f(dist.grid.point(i)) for i in range(dist.grid.size)], dtype=float)
    else:
        vals = np.asarray(f, dtype=float)
    return float(dist.weights @ vals)


def _check_shared(mu1: DiscreteDistribution, mu2: DiscreteDistribution):
    if mu1.grid != mu2.grid:
        raise ValueError("distributions live on different grids")


def _covers(shape: tuple[int, ...]) -> list[list[int]]:
    """Immediate successors of every flat index in the product order."""
    succ = []
    for multi in itertools.product(*[range(s) for s in shape]):
        nxt = []
        for k in range(len(shape)):
            if multi[k] + 1 < shape[k]:
                m = list(multi)
                m[k] += 1
                nxt.append(int(np.ravel_multi_index(m, shape)))
        succ.append(nxt)
    return succ


def upper_sets(grid: SupportGrid) -> list[np.ndarray]:
    """Every upper set of the grid's product order, as boolean masks."""
    if grid.size > MAX_UPPER_SET_POINTS:
        raise GridTooLargeError(
            f"{grid.size} points exceeds the upper-set enumeration cap of {MAX_UPPER_SET_POINTS}"
        )
    succ = _covers(grid.shape)
    # Descending rank order guarantees successors are decided first.
    ranks = [sum(m) for m in itertools.product(*[range(s) for s in grid.shape])]
    order = sorted(range(grid.size), key=lambda i: -ranks[i])
    found = []
    mask = np.zeros(grid.size, dtype=bool)

    def walk(pos):
        if pos == len(order):
            found.append(mask.copy())
            return
        i = order[pos]
        mask[i] = False
        walk(pos + 1)
        if all(mask[j] for j in succ[i]):
            mask[i] = True
            walk(pos + 1)
            mask[i] = False

    walk(0)
    return found


def stochastic_leq(mu1: DiscreteDistribution, mu2: DiscreteDistribution, tol: float = DEFAULT.order) -> bool:
    """Usual stochastic order: ``mu1(U) <= mu2(U)`` for every upper set ``U``."""
    _check_shared(mu1, mu2)
    if mu1.grid.ndim <= 1:
        return bool(np.all(mu1.cdf() >= mu2.cdf() - tol))
    for u in upper_sets(mu1.grid):
        if mu1.weights[u].sum() > mu2.weights[u].sum() + tol:
            return False
    return True


def _from_survival(grid: SupportGrid, surv: np.ndarray) -> DiscreteDistribution:
    arr = surv.reshape(grid.shape)
    for axis in range(arr.ndim):
        # m[i] = S[i] - S[i + 1] along each axis, with S past the top equal to 0
        shifted = np.zeros_like(arr)
        src = [slice(None)] * arr.ndim
        dst = [slice(None)] * arr.ndim
        src[axis], dst[axis] = slice(1, None), slice(None, -1)
        shifted[tuple(dst)] = arr[tuple(src)]
        arr = arr - shifted
    masses = arr.ravel()
    if masses.min() < -DEFAULT.lattice_negative:
        raise LatticeConstructionError(
            f"inclusion-exclusion gives mass {masses.min():.3g} at point "
            f"{grid.point(int(np.argmin(masses)))}",
            masses=masses,
        )
    masses = np.clip(masses, 0.0, None)
    return DiscreteDistribution(grid, masses / masses.sum())


def lattice_join(mu1: DiscreteDistribution, mu2: DiscreteDistribution) -> DiscreteDistribution:
    """Least upper bound candidate: pointwise max of upper-rectangle masses."""
    _check_shared(mu1, mu2)
    return _from_survival(mu1.grid, np.maximum(mu1.survival(), mu2.survival()))


def lattice_meet(mu1: DiscreteDistribution, mu2: DiscreteDistribution) -> DiscreteDistribution:
    """Greatest lower bound candidate: pointwise min of upper-rectangle masses."""
    _check_shared(mu1, mu2)
    return _from_survival(mu1.grid, np.minimum(mu1.survival(), mu2.survival()))
