"""Probability measures on the line: atomic measures, products, gridded densities."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Finitely supported probability measure; atoms strictly increasing."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.atoms.shape != self.weights.shape or self.atoms.ndim != 1:
            raise ValueError("atoms and weights must be 1-d arrays of equal length")
        if self.atoms.size == 0:
            raise ValueError("empty measure")
        if np.any(np.diff(self.atoms) <= 0):
            raise ValueError("atoms must be strictly increasing; use atomic() to normalise")
        if np.any(self.weights < 0):
            raise ValueError("negative weight")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        self.atoms.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return self.atoms.size

    def __eq__(self, other):
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return np.array_equal(self.atoms, other.atoms) and np.array_equal(self.weights, other.weights)

    def mix(self, other: "AtomicMeasure", t: float = 0.5) -> "AtomicMeasure":
        """(1 - t) * self + t * other."""
        return atomic(
            np.concatenate([self.atoms, other.atoms]),
            np.concatenate([(1 - t) * self.weights, t * other.weights]),
        )

    def to_dict(self) -> dict:
        return {"atoms": self.atoms.tolist(), "weights": self.weights.tolist()}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["atom", "weight"])
        for a, p in zip(self.atoms, self.weights):
            w.writerow([repr(float(a)), repr(float(p))])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "AtomicMeasure":
        return _restore(d["atoms"], d["weights"])

    @classmethod
    def from_json(cls, text: str) -> "AtomicMeasure":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_csv(cls, text: str) -> "AtomicMeasure":
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] and rows[0][0].strip().lower() == "atom":
            rows = rows[1:]
        rows = [r for r in rows if r and r[0].strip()]
        return _restore([float(r[0]) for r in rows], [float(r[1]) for r in rows])


def _restore(atoms, weights) -> AtomicMeasure:
    """Keep serialised data bit-for-bit when already normalised; otherwise normalise."""
    a = np.asarray(atoms, dtype=float)
    w = np.asarray(weights, dtype=float)
    if a.ndim == 1 and a.shape == w.shape and np.all(np.isfinite(a)) and np.all(w >= 0):
        try:
            return AtomicMeasure(a, w)
        except ValueError:
            pass
    return atomic(a, w)


def atomic(points, weights=None) -> AtomicMeasure:
    """Normalised atomic measure; exactly equal atoms are merged by adding weights."""
    pts = np.asarray(points, dtype=float).ravel()
    w = np.ones_like(pts) if weights is None else np.asarray(weights, dtype=float).ravel()
    if pts.size == 0:
        raise ValueError("empty measure")
    if pts.shape != w.shape:
        raise ValueError("points and weights differ in length")
    if np.any(w < 0) or not np.all(np.isfinite(w)) or not np.all(np.isfinite(pts)):
        raise ValueError("weights must be finite and non-negative, atoms finite")
    total = math.fsum(w)
    if total <= 0:
        raise ValueError("total weight must be positive")
    atoms, inv = np.unique(pts, return_inverse=True)
    merged = np.zeros_like(atoms)
    np.add.at(merged, inv, w)
    merged = merged / total
    merged = merged / math.fsum(merged)
    return AtomicMeasure(atoms, merged)


def dirac(x: float) -> AtomicMeasure:
    return AtomicMeasure(np.array([float(x)]), np.array([1.0]))


@dataclass(frozen=True)
class ProductMeasure:
    left: AtomicMeasure
    right: AtomicMeasure

    def weight_matrix(self) -> np.ndarray:
        return np.outer(self.left.weights, self.right.weights)

    def to_dict(self) -> dict:
        return {"left": self.left.to_dict(), "right": self.right.to_dict()}


def moment(nu, r: int) -> float:
    """r-th moment of an AtomicMeasure (exact sum) or GriddedDensity (trapezoid)."""
    if r < 0 or int(r) != r:
        raise ValueError("moment order must be a non-negative integer")
    if isinstance(nu, GriddedDensity):
        return nu.moment(r)
    return float(np.sum(nu.weights * nu.atoms ** int(r)))


# --------------------------------------------------------------------------
# gridded densities

@dataclass(frozen=True, eq=False)
class GriddedDensity:
    """Density samples f(x0 + k*step), k = 0..len(values)-1, integrated by the trapezoid rule."""

    x0: float
    step: float
    values: np.ndarray

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if np.any(self.values < 0):
            raise ValueError("density values must be non-negative")
        if abs(self.mass() - 1.0) > 1e-9:
            raise ValueError(f"trapezoid mass {self.mass()} differs from 1")

    @property
    def grid(self) -> np.ndarray:
        return self.x0 + self.step * np.arange(self.values.size)

    def mass(self) -> float:
        return float(integrate.trapezoid(self.values, dx=self.step))

    def moment(self, r: int) -> float:
        return float(integrate.trapezoid(self.values * self.grid ** int(r), dx=self.step))

    def cdf(self) -> np.ndarray:
        return np.concatenate([[0.0], integrate.cumulative_trapezoid(self.values, dx=self.step)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "density"])
        for x, f in zip(self.grid, self.values):
            w.writerow([repr(float(x)), repr(float(f))])
        return buf.getvalue()


def density_on_grid(f, lo: float, hi: float, num: int) -> GriddedDensity:
    """Sample a density on [lo, hi] and renormalise to unit trapezoid mass."""
    x = np.linspace(lo, hi, num)
    v = np.asarray(f(x), dtype=float)
    step = (hi - lo) / (num - 1)
    return GriddedDensity(lo, step, v / integrate.trapezoid(v, dx=step))


def quantile_partition(density: GriddedDensity, n: int) -> np.ndarray:
    """Points a_0 < ... < a_n cutting the support into n cells of mass 1/n.

    The density is treated as the piecewise-linear interpolant of its
    samples, so the cell masses are exact for that interpolant.
    """
    if n < 1:
        raise ValueError("n must be positive")
    v = density.values
    x = density.grid
    pos = np.nonzero(v > 0)[0]
    if pos.size == 0:
        raise ValueError("density vanishes on the grid")
    i_lo = max(pos[0] - 1, 0)
    i_hi = min(pos[-1] + 1, v.size - 1)
    cells = i_hi - i_lo
    if n > cells:
        raise ValueError(
            f"n={n} exceeds the {cells} grid cells spanning the support; refine the grid"
        )
    cdf = density.cdf()
    total = cdf[-1]
    out = np.empty(n + 1)
    out[0], out[n] = x[i_lo], x[i_hi]
    h = density.step
    for q in range(1, n):
        target = total * q / n
        j = int(np.searchsorted(cdf, target, side="left")) - 1
        j = min(max(j, i_lo), i_hi - 1)
        rem = target - cdf[j]
        f0, f1 = v[j], v[j + 1]
        s = (f1 - f0) / h
        # solve f0*t + s*t^2/2 = rem on [0, h]
        if abs(s) * h <= 1e-14 * max(f0, 1e-300):
            t = rem / f0
        else:
            disc = max(f0 * f0 + 2.0 * s * rem, 0.0)
            t = 2.0 * rem / (f0 + math.sqrt(disc)) if f0 + math.sqrt(disc) > 0 else 0.0
        out[q] = x[j] + min(max(t, 0.0), h)
    if np.any(np.diff(out) <= 0):
        raise ValueError("partition not strictly increasing; grid too coarse for this n")
    return out


def _hat_primitive(t):
    """Antiderivative of the unit hat max(0, 1 - |t|)."""
    t = np.clip(t, -1.0, 1.0)
    return np.where(t <= 0, 0.5 * (t + 1.0) ** 2, 1.0 - 0.5 * (1.0 - t) ** 2)


def smooth(nu: AtomicMeasure, eps: float, step: float) -> GriddedDensity:
    """Density of nu convolved with Uniform[-eps, eps], on a grid of spacing ``step``.

    Grid values are hat-function projections of the plateau density, so the
    trapezoid rule returns the exact mass and exact first moment; the
    trapezoid second moment exceeds the exact one by at most step^2/4.
    """
    if eps <= 0 or step <= 0:
        raise ValueError("eps and step must be positive")
    if step > eps / 8:
        raise ValueError("step must be at most eps/8 to resolve the plateau edges")
    lo = nu.atoms[0] - eps - 2 * step
    cells = int(math.ceil((nu.atoms[-1] + eps + 2 * step - lo) / step))
    grid = lo + step * np.arange(cells + 1)
    a = (nu.atoms[None, :] - eps - grid[:, None]) / step
    b = (nu.atoms[None, :] + eps - grid[:, None]) / step
    overlap = _hat_primitive(b) - _hat_primitive(a)  # (1/step) * int over plateau of the hat
    values = overlap @ (nu.weights / (2 * eps))
    return GriddedDensity(float(lo), float(step), values)


def empirical(ensemble):
    """(joint, marginal_x, average) empirical measures of an ensemble with fields x, y.

    The joint empirical measure (1/n^2) sum delta_{(x_i, y_j)} is returned in
    its exact product form.
    """
    x = np.asarray(ensemble.x, dtype=float)
    y = np.asarray(ensemble.y, dtype=float)
    if x.size == 0:
        raise ValueError("empty ensemble")
    nx, ny = atomic(x), atomic(y)
    return ProductMeasure(nx, ny), nx, atomic(np.concatenate([x, y]))


# --------------------------------------------------------------------------
# smoothing of the logarithmic energy

def log_plus_expectation(eps: float, z: float) -> float:
    """E log+(1 / |1 + eps U / z|) for U with triangular density (2 - |u|)/4 on [-2, 2]."""
    if z == 0:
        raise ValueError("z must be non-zero")

    def integrand(u):
        r = abs(1.0 + eps * u / z)
        return (2.0 - abs(u)) / 4.0 * (-math.log(r) if 0 < r < 1 else 0.0)

    # log+ vanishes unless |1 + eps u / z| < 1, i.e. u between -2z/eps and 0
    lo, hi = sorted((-2.0 * z / eps, 0.0))
    lo, hi = max(lo, -2.0), min(hi, 2.0)
    if hi <= lo:
        return 0.0
    sing = -z / eps
    pts = [sing] if lo < sing < hi else None
    val, _ = integrate.quad(integrand, lo, hi, points=pts, limit=200)
    return val


def log_plus_bound(eps: float, z: float) -> float:
    """Upper bound log(1 + 2 eps/|z|) / log 2 on ``log_plus_expectation``."""
    return math.log1p(2.0 * eps / abs(z)) / math.log(2.0)
