"""Finite measures on [0, 1) discretized into 2**k equal cells.

A :class:`GridMeasure` stores cell masses.  It plays the role of probability
laws, densities (mass per cell), and finite Poisson mean measures alike.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError

MASS_TOL = 1e-12


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class GridMeasure:
    """Nonnegative cell masses on ``n_cells`` equal cells of [0, 1)."""

    weights: np.ndarray
    mass: float = field(init=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64, copy=True).ravel()
        if not _is_power_of_two(w.size):
            raise DimensionError(f"n_cells must be a power of two, got {w.size}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "mass", math.fsum(w))

    @property
    def n_cells(self) -> int:
        return self.weights.size

    @property
    def is_probability(self) -> bool:
        return abs(self.mass - 1.0) <= MASS_TOL

    @property
    def density(self) -> np.ndarray:
        """Cell-constant density with respect to Lebesgue measure."""
        return self.weights * self.n_cells

    def to_json(self) -> dict:
        return {"n_cells": self.n_cells, "weights": [float(x) for x in self.weights]}

    @classmethod
    def from_json(cls, obj: dict) -> "GridMeasure":
        m = cls(np.asarray(obj["weights"], dtype=np.float64))
        if "n_cells" in obj and int(obj["n_cells"]) != m.n_cells:
            raise DimensionError("n_cells does not match the weights length")
        return m

    def __repr__(self):
        return f"GridMeasure(n_cells={self.n_cells}, mass={self.mass:.6g})"


@dataclass(frozen=True, eq=False)
class DyadicSet:
    """A set of grid cells, stored as sorted unique indices."""

    cells: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.cells, dtype=np.int64).ravel()
        if c.size and np.any(np.diff(c) <= 0):
            raise ValueError("cell indices must be strictly increasing")
        if c.size and c[0] < 0:
            raise ValueError("cell indices must be nonnegative")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "cells", c)

    @classmethod
    def interval(cls, lo: float, hi: float, n_cells: int) -> "DyadicSet":
        """Cells covering [lo, hi); both ends must fall on cell edges."""
        a, b = lo * n_cells, hi * n_cells
        if abs(a - round(a)) > 1e-9 or abs(b - round(b)) > 1e-9:
            raise ValueError("interval endpoints must be aligned with the grid")
        a, b = int(round(a)), int(round(b))
        if not 0 <= a <= b <= n_cells:
            raise ValueError("interval must lie in [0, 1)")
        return cls(np.arange(a, b))

    @classmethod
    def dyadic(cls, level: int, index: int, n_cells: int) -> "DyadicSet":
        """The ``index``-th interval of length 2**-level."""
        width = n_cells >> level
        if width < 1 or (width << level) != n_cells or not 0 <= index < (1 << level):
            raise ValueError(f"invalid dyadic interval (level={level}, index={index})")
        return cls(np.arange(index * width, (index + 1) * width))

    def bounds(self, n_cells: int):
        """(lo, hi) when the set is a contiguous interval, else None."""
        c = self.cells
        if c.size == 0 or c[-1] - c[0] + 1 != c.size:
            return None
        return c[0] / n_cells, (c[-1] + 1) / n_cells

    def to_json(self) -> list:
        return [int(x) for x in self.cells]

    def __len__(self):
        return self.cells.size

    def __eq__(self, other):
        return isinstance(other, DyadicSet) and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash(self.cells.tobytes())


class DensityFamily:
    """A finite family of measures on one grid, stored as a (members, n_cells) matrix."""

    def __init__(self, members: Iterable, *, probability: bool | None = None):
        rows = []
        for m in members:
            rows.append(m.weights if isinstance(m, GridMeasure) else np.asarray(m, dtype=np.float64))
        if not rows:
            raise ValueError("a family needs at least one member")
        sizes = {r.size for r in rows}
        if len(sizes) != 1:
            raise DimensionError("family members must share n_cells")
        mat = np.array(rows, dtype=np.float64)
        if not _is_power_of_two(mat.shape[1]):
            raise DimensionError("n_cells must be a power of two")
        if np.any(mat < 0) or not np.all(np.isfinite(mat)):
            raise ValueError("weights must be finite and nonnegative")
        masses = np.array([math.fsum(r) for r in mat])
        is_prob = np.abs(masses - 1.0) <= MASS_TOL
        if probability is None:
            probability = bool(is_prob.all())
        if probability and not is_prob.all():
            raise ValueError("probability family has a member with mass != 1")
        mat.flags.writeable = False
        self.matrix = mat
        self.probability = bool(probability)

    @property
    def n_cells(self) -> int:
        return self.matrix.shape[1]

    def __len__(self):
        return self.matrix.shape[0]

    def __getitem__(self, i) -> GridMeasure:
        return GridMeasure(self.matrix[i])

    def __iter__(self):
        return (GridMeasure(r) for r in self.matrix)

    def to_json(self) -> dict:
        return {
            "n_cells": self.n_cells,
            "probability": self.probability,
            "members": [[float(x) for x in r] for r in self.matrix],
        }

    @classmethod
    def from_json(cls, obj) -> "DensityFamily":
        if isinstance(obj, list):
            members = obj
            probability = None
        else:
            members = obj["members"]
            probability = obj.get("probability")
        rows = [m["weights"] if isinstance(m, dict) else m for m in members]
        fam = cls(rows, probability=probability)
        if isinstance(obj, dict) and "n_cells" in obj and int(obj["n_cells"]) != fam.n_cells:
            raise DimensionError("n_cells does not match the member length")
        return fam

    def __repr__(self):
        kind = "probability" if self.probability else "finite"
        return f"DensityFamily({len(self)} {kind} members, n_cells={self.n_cells})"


def load_family(path) -> DensityFamily:
    with open(path) as fh:
        return DensityFamily.from_json(json.load(fh))


def save_family(family: DensityFamily, path) -> None:
    with open(path, "w") as fh:
        json.dump(family.to_json(), fh)


# -- constructors --------------------------------------------------------------

def uniform(n_cells: int, mass: float = 1.0) -> GridMeasure:
    return GridMeasure(np.full(n_cells, mass / n_cells))


def point_mass(cell: int, n_cells: int, mass: float = 1.0) -> GridMeasure:
    if not 0 <= cell < n_cells:
        raise ValueError("cell index out of range")
    w = np.zeros(n_cells)
    w[cell] = mass
    return GridMeasure(w)


def sine_density(i: int, n_cells: int) -> GridMeasure:
    """Cell integrals of x -> 1 + sin(2*pi*i*x).

    Exact cell integrals keep the mass at one and match analytic integrals over
    any union of cells.
    """
    if i < 1:
        raise ValueError("frequency must be >= 1")
    if 4 * i > n_cells:
        raise ValueError(f"frequency {i} is not resolvable on {n_cells} cells (need i <= n_cells/4)")
    edges = np.arange(n_cells + 1) / n_cells
    a, b = edges[:-1], edges[1:]
    k = 2.0 * np.pi * i
    # cos(ka) - cos(kb) = 2 sin(k(a+b)/2) sin(k(b-a)/2)
    w = (b - a) + 2.0 * np.sin(0.5 * k * (a + b)) * np.sin(0.5 * k * (b - a)) / k
    return GridMeasure(np.maximum(w, 0.0))


def sine_family(frequencies: Iterable[int], n_cells: int) -> DensityFamily:
    return DensityFamily([sine_density(i, n_cells).weights for i in frequencies])


# -- operations -----------------------------------------------------------------

def _check_same_grid(*measures: GridMeasure) -> None:
    sizes = {m.n_cells for m in measures}
    if len(sizes) != 1:
        raise DimensionError(f"measures live on different grids: {sorted(sizes)}")


def _require_probability(*measures: GridMeasure) -> None:
    for m in measures:
        if not m.is_probability:
            raise ValueError(f"expected a probability measure, got mass {m.mass!r}")


def total_variation(p: GridMeasure, q: GridMeasure) -> float:
    """Half the L1 distance between cell masses."""
    _check_same_grid(p, q)
    return 0.5 * math.fsum(np.abs(p.weights - q.weights))


def measure_of_set(p: GridMeasure, b: DyadicSet) -> float:
    if b.cells.size and b.cells[-1] >= p.n_cells:
        raise IndexError(f"cell index {b.cells[-1]} out of range for {p.n_cells} cells")
    return math.fsum(p.weights[b.cells])


def mixture(family: DensityFamily, weights: Sequence[float]) -> GridMeasure:
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.size != len(family):
        raise DimensionError("one mixture weight per family member is required")
    if np.any(w < 0) or abs(math.fsum(w) - 1.0) > MASS_TOL:
        raise ValueError("mixture weights must lie on the probability simplex")
    return GridMeasure(np.maximum(w @ family.matrix, 0.0))


def sample(p: GridMeasure, n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. cell indices drawn from ``p``."""
    rng = np.random.default_rng(seed)
    return sample_with(p, n, rng)


def sample_with(p: GridMeasure, size, rng: np.random.Generator) -> np.ndarray:
    _require_probability(p)
    cdf = np.cumsum(p.weights)
    cdf[-1] = 1.0
    u = rng.random(size)
    return np.searchsorted(cdf, u, side="right").astype(np.int64)


def dyadic_masses(p: GridMeasure, r: int) -> np.ndarray:
    """Masses of the 2**r dyadic intervals of length 2**-r."""
    levels = int(round(math.log2(p.n_cells)))
    if not 0 <= r <= levels:
        raise ValueError(f"resolution must be in [0, {levels}], got {r}")
    return p.weights.reshape(1 << r, -1).sum(axis=1)


def tau_discrepancy(p: GridMeasure, q: GridMeasure, resolution: int) -> float:
    """Largest mass difference over dyadic intervals at the given resolution."""
    _check_same_grid(p, q)
    return float(np.max(np.abs(dyadic_masses(p, resolution) - dyadic_masses(q, resolution))))


def wasserstein1(p: GridMeasure, q: GridMeasure) -> float:
    """Wasserstein-1 distance via the CDF difference, cells located at their left edges."""
    _check_same_grid(p, q)
    _require_probability(p, q)
    diff = np.cumsum(p.weights - q.weights)
    return math.fsum(np.abs(diff)) / p.n_cells
