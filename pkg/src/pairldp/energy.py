"""The bilinear energy K(nu1 x nu2) = iint k d nu1 d nu2 and the rate functions built on it."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import optimize

from .kernel import ConvergenceError, InteractionKernel, infimum_k
from .measure import AtomicMeasure, ProductMeasure, atomic
from .streams import stream


class NegDefWarning(UserWarning):
    """The average-measure rate was requested for a kernel that failed the negative definiteness check."""


@dataclass(frozen=True, eq=False)
class BivariateAtomic:
    """Atomic measure on the plane with weight matrix W[i, j] at (xs[i], ys[j])."""

    xs: np.ndarray
    ys: np.ndarray
    weight_matrix: np.ndarray

    def __post_init__(self):
        if self.weight_matrix.shape != (self.xs.size, self.ys.size):
            raise ValueError("weight matrix shape does not match the atoms")
        if np.any(self.weight_matrix < 0):
            raise ValueError("negative weight")
        if abs(self.weight_matrix.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")

    @classmethod
    def from_points(cls, points, weights) -> "BivariateAtomic":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        w = np.asarray(weights, dtype=float).ravel()
        if np.any(w < 0) or w.sum() <= 0:
            raise ValueError("weights must be non-negative with positive sum")
        xs, ix = np.unique(pts[:, 0], return_inverse=True)
        ys, iy = np.unique(pts[:, 1], return_inverse=True)
        W = np.zeros((xs.size, ys.size))
        np.add.at(W, (ix, iy), w)
        return cls(xs, ys, W / W.sum())

    @classmethod
    def from_product(cls, mu: ProductMeasure) -> "BivariateAtomic":
        return cls(mu.left.atoms.copy(), mu.right.atoms.copy(), mu.weight_matrix())

    def marginals(self) -> tuple[AtomicMeasure, AtomicMeasure]:
        return atomic(self.xs, self.weight_matrix.sum(axis=1)), atomic(self.ys, self.weight_matrix.sum(axis=0))

    def integrate(self, F) -> float:
        """iint F(x, y) mu(dx, dy) for a vectorised bivariate F."""
        vals = np.asarray(F(self.xs[:, None], self.ys[None, :]), dtype=float)
        return _weighted_sum(self.weight_matrix, np.broadcast_to(vals, self.weight_matrix.shape))


@dataclass(frozen=True)
class RateContext:
    kernel: InteractionKernel
    I0: float
    I0_tol: float
    argmin: tuple[float, float] = (0.0, 0.0)
    negative_definite: Optional[bool] = field(default=None)

    @classmethod
    def from_kernel(cls, kernel: InteractionKernel, tol: float = 1e-9, check_negdef: bool = False) -> "RateContext":
        I0, arg = infimum_k(kernel, tol=tol)
        nd = negdef_check(kernel, 200, 6, 0).passed if check_negdef else None
        # Nelder-Mead with xatol=tol leaves a value error far below tol near a smooth minimum
        return cls(kernel, I0, max(tol, 1e-12), arg, nd)


def _weighted_sum(W: np.ndarray, K: np.ndarray) -> float:
    """sum W*K with +inf whenever an infinite entry carries positive weight."""
    pos = W > 0
    Kp = K[pos]
    if np.any(np.isnan(Kp)):
        return float("nan")
    if np.any(np.isposinf(Kp)):
        return float("inf") if not np.any(np.isneginf(Kp)) else float("nan")
    # numpy reduces with pairwise summation: order-independent to rounding
    return float(np.sum(W[pos] * Kp))


def energy_K(kernel: InteractionKernel, mu: ProductMeasure) -> float:
    K = kernel.eval_k(mu.left.atoms[:, None], mu.right.atoms[None, :])
    return _weighted_sum(mu.weight_matrix(), np.asarray(K))


def rate(ctx: RateContext, mu: ProductMeasure) -> float:
    return energy_K(ctx.kernel, mu) - ctx.I0


class RankOneSplit(NamedTuple):
    product: Optional[ProductMeasure]
    second_singular_value: float


def rank_one_split(mu: BivariateAtomic, rank_tol: float = 1e-10) -> RankOneSplit:
    """Factor mu into its marginals when the weight matrix is rank one within ``rank_tol``."""
    s = np.linalg.svd(mu.weight_matrix, compute_uv=False)
    s2 = float(s[1]) if s.size > 1 else 0.0
    if s2 > rank_tol:
        return RankOneSplit(None, s2)
    left, right = mu.marginals()
    return RankOneSplit(ProductMeasure(left, right), s2)


def rate_joint(ctx: RateContext, mu: BivariateAtomic, rank_tol: float = 1e-10) -> float:
    """The rate of a planar atomic measure: finite only on (numerically) rank-one weights."""
    split = rank_one_split(mu, rank_tol)
    if split.product is None:
        return float("inf")
    return rate(ctx, split.product)


def marginal_rate(ctx: RateContext, nu: AtomicMeasure, tol: float = 1e-10, num: int = 2001) -> float:
    """inf over nu2 of I(nu x nu2) = inf_y sum_i w_i k(x_i, y) - I0.

    The infimum over nu2 of a linear functional is attained at a point mass,
    so this is a one-dimensional minimisation over y.
    """
    kern = ctx.kernel
    lo = min(kern.search_box[2], nu.atoms[0])
    hi = max(kern.search_box[3], nu.atoms[-1])
    ygrid = np.linspace(lo, hi, num)

    def h(y):
        K = np.asarray(kern.eval_k(nu.atoms[:, None], np.atleast_1d(y)[None, :]))
        with np.errstate(invalid="ignore"):
            out = nu.weights @ np.where(np.isnan(K), np.inf, K)
        return out

    hv = h(ygrid)
    j = int(np.argmin(hv))
    if not np.isfinite(hv[j]):
        raise ConvergenceError("h(y) infinite on the whole scan grid")
    a, b = ygrid[max(j - 1, 0)], ygrid[min(j + 1, num - 1)]
    res = optimize.minimize_scalar(lambda y: float(h(y)[0]), bounds=(a, b), method="bounded", options={"xatol": tol})
    best = min(float(res.fun), float(hv[j]))
    return best - ctx.I0


def average_rate(ctx: RateContext, nu: AtomicMeasure) -> float:
    """K(nu x nu) - I0, the rate of the average empirical measure under negative definite k."""
    if ctx.negative_definite is False:
        warnings.warn(
            f"kernel {ctx.kernel.spec} failed the negative definiteness check; "
            "K(nu x nu) - I0 is returned without the contraction identity behind it",
            NegDefWarning,
            stacklevel=2,
        )
    return energy_K(ctx.kernel, ProductMeasure(nu, nu)) - ctx.I0


# --------------------------------------------------------------------------
# negative definiteness and its consequences

class NegDefWitness(NamedTuple):
    points: np.ndarray
    coefficients: np.ndarray
    value: float


class NegDefResult(NamedTuple):
    passed: bool
    witness: Optional[NegDefWitness]


def quadratic_form(kernel: InteractionKernel, points, c) -> float:
    """sum_ij c_i c_j k(x_i, x_j); terms with c_i c_j = 0 are skipped."""
    x = np.asarray(points, dtype=float)
    c = np.asarray(c, dtype=float)
    K = np.asarray(kernel.eval_k(x[:, None], x[None, :]))
    C = np.outer(c, c)
    nz = C != 0
    if not nz.any():
        return 0.0
    terms = C[nz] * K[nz]
    if np.any(np.isnan(terms)):
        return float("nan")
    return float(np.sum(terms))


def negdef_check(kernel: InteractionKernel, num_trials: int = 1000, num_points: int = 5, rng_seed=0) -> NegDefResult:
    """Random search for sum c_i c_j k(x_i, x_j) > 1e-9 with sum c_i = 0.

    Points are drawn uniformly from the x-range of the search box and the
    coefficients are centred standard normals.
    """
    if num_points < 2:
        raise ValueError("need at least two points")
    rng = stream(rng_seed, "negdef")
    lo = max(kernel.search_box[0], kernel.search_box[2])
    hi = min(kernel.search_box[1], kernel.search_box[3])
    for _ in range(num_trials):
        x = rng.uniform(lo, hi, num_points)
        c = rng.standard_normal(num_points)
        c -= c.mean()
        v = quadratic_form(kernel, x, c)
        if not v <= 1e-9:
            return NegDefResult(False, NegDefWitness(x, c, v))
    return NegDefResult(True, None)


class TwoKResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def check_2K(kernel: InteractionKernel, nu1: AtomicMeasure, nu2: AtomicMeasure) -> TwoKResult:
    """2 K(nu1 x nu2) >= K(nu1 x nu1) + K(nu2 x nu2)."""
    lhs = 2.0 * energy_K(kernel, ProductMeasure(nu1, nu2))
    rhs = energy_K(kernel, ProductMeasure(nu1, nu1)) + energy_K(kernel, ProductMeasure(nu2, nu2))
    return TwoKResult(lhs, rhs, bool(lhs >= rhs - 1e-9))


def tightness_q(kernel: InteractionKernel, mu: ProductMeasure) -> float:
    """q(mu) = iint (k + C) d mu, non-negative by construction of C."""
    return energy_K(kernel, mu) + kernel.lower_bound_C
