"""Draws from Pr_n(dx, dy) proportional to prod_{i,j} g(x_i, y_j) dx dy.

Exact sampler for the Gaussian kernel
-------------------------------------
With S_x = sum x_i and R_x = sum (x_i - S_x/n)^2 (same for y), the
log-density -n sum x_i^2 - n sum y_j^2 + 2 theta S_x S_y splits as

    -(S_x^2 + S_y^2 - 2 theta S_x S_y) - n R_x - n R_y.

So (S_x, S_y) is centred Gaussian with covariance
(1/2) (1 - theta^2)^-1 [[1, theta], [theta, 1]], independent of the
zero-sum residuals, which are isotropic with variance 1/(2n) in the
hyperplane.  A draw costs O(n): a 2x2 Cholesky for the sums, and n i.i.d.
N(0, 1/(2n)) projected onto sum = 0 for each residual.

General kernels use single-site random-walk Metropolis; chains are
vectorised across replicas, each replica driven by its own stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .kernel import InteractionKernel, infimum_k
from .streams import stream


@dataclass(frozen=True, eq=False)
class Ensemble:
    n: int
    x: np.ndarray
    y: np.ndarray
    seed_info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.x.shape != (self.n,) or self.y.shape != (self.n,):
            raise ValueError("x and y must both have length n")

    def to_csv(self) -> str:
        lines = ["index,x,y"]
        lines += [f"{i},{float(a)!r},{float(b)!r}" for i, (a, b) in enumerate(zip(self.x, self.y))]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class McmcConfig:
    steps: int
    burn_in: int
    proposal_scale: Optional[float] = None  # default 1/sqrt(n)
    thinning: int = 1
    seed: int = 0
    adapt: bool = False  # Robbins-Monro tuning of the scale, burn-in only
    target_acceptance: float = 0.3

    def __post_init__(self):
        if self.steps <= self.burn_in or self.burn_in < 0:
            raise ValueError("need steps > burn_in >= 0")
        if self.thinning < 1:
            raise ValueError("thinning must be positive")
        if self.proposal_scale is not None and not self.proposal_scale > 0:
            raise ValueError("proposal_scale must be positive")

    @classmethod
    def default(cls, n: int, seed: int = 0, sweeps: int = 200) -> "McmcConfig":
        burn = 10 * n * n
        return cls(steps=burn + sweeps * 2 * n, burn_in=burn, seed=seed)


def log_density(kernel: InteractionKernel, e: Ensemble) -> float:
    """-sum_{i,j} k(x_i, y_j); -inf on singular configurations."""
    K = np.asarray(kernel.eval_k(e.x[:, None], e.y[None, :]))
    if np.any(np.isnan(K)) or np.any(np.isposinf(K)):
        return float("-inf")
    return -float(np.sum(K))


def _check_theta(theta):
    if not abs(theta) < 1:
        raise ValueError(f"|theta| < 1 required (got {theta})")


def sample_gaussian_batch(theta: float, n: int, size: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """``size`` exact draws as arrays of shape (size, n)."""
    _check_theta(theta)
    rng = stream(rng) if not isinstance(rng, np.random.Generator) else rng
    c = 1.0 / math.sqrt(2.0 * (1.0 - theta * theta))
    z = rng.standard_normal((size, 2))
    sx = c * z[:, 0]
    sy = c * (theta * z[:, 0] + math.sqrt(1.0 - theta * theta) * z[:, 1])
    g = rng.standard_normal((size, 2, n)) / math.sqrt(2.0 * n)
    g -= g.mean(axis=2, keepdims=True)
    x = g[:, 0, :] + (sx / n)[:, None]
    y = g[:, 1, :] + (sy / n)[:, None]
    return x, y


def sample_gaussian_exact(theta: float, n: int, rng_seed=0) -> Ensemble:
    x, y = sample_gaussian_batch(theta, n, 1, stream(rng_seed, "gaussian-exact"))
    return Ensemble(n, x[0], y[0], {"sampler": "gaussian-exact", "theta": theta, "seed": rng_seed})


def log_partition_gaussian(theta: float, n: int) -> float:
    """log Z_n = n log(pi/n) - (1/2) log(1 - theta^2)."""
    _check_theta(theta)
    return n * math.log(math.pi / n) - 0.5 * math.log1p(-theta * theta)


# --------------------------------------------------------------------------
# Metropolis

class McmcDiagnostics(NamedTuple):
    acceptance_rate: np.ndarray  # per chain, post burn-in
    energy_mean: np.ndarray  # mean of sum k over thinned post burn-in states
    energy_std: np.ndarray
    final_energy: np.ndarray
    proposal_scale: np.ndarray
    initial_x: np.ndarray
    initial_y: np.ndarray
    flags: list


def _row_energy(kernel, a, B, first):
    """sum_j k(a, B_j) (first=True) or sum_i k(B_i, a), per chain."""
    K = kernel.eval_k(a[:, None], B) if first else kernel.eval_k(B, a[:, None])
    K = np.where(np.isnan(K), np.inf, K)
    return K.sum(axis=1)


def sample_mcmc_batch(kernel: InteractionKernel, n: int, cfg: McmcConfig, num_chains: int,
                      start: Optional[tuple[float, float]] = None):
    """Run ``num_chains`` independent chains; chain r uses stream (cfg.seed, "mcmc", r).

    Returns (X, Y, diagnostics) with X, Y of shape (num_chains, n).
    """
    if start is None:
        _, start = infimum_k(kernel)
    scale0 = cfg.proposal_scale if cfg.proposal_scale is not None else 1.0 / math.sqrt(n)
    gens = [stream(cfg.seed, "mcmc", r) for r in range(num_chains)]
    jit = min(1e-3, 1e-2 * scale0)
    X = np.empty((num_chains, n))
    Y = np.empty((num_chains, n))
    for r, g in enumerate(gens):
        X[r] = start[0] + jit * g.standard_normal(n)
        Y[r] = start[1] + jit * g.standard_normal(n)
    X0, Y0 = X.copy(), Y.copy()
    K = kernel.eval_k(X[:, :, None], Y[:, None, :])
    if not np.all(np.isfinite(K)):
        raise ValueError("initial configuration has infinite energy")
    energy = K.sum(axis=(1, 2))

    scale = np.full(num_chains, scale0)
    accepted = np.zeros(num_chains)
    post = cfg.steps - cfg.burn_in
    e_sum = np.zeros(num_chains)
    e_sq = np.zeros(num_chains)
    e_cnt = 0
    rows = np.arange(num_chains)
    block = 1024
    for b0 in range(0, cfg.steps, block):
        m = min(block, cfg.steps - b0)
        coord = np.stack([g.integers(0, 2 * n, m) for g in gens])
        step = np.stack([g.standard_normal(m) for g in gens])
        logu = np.log(np.stack([g.random(m) for g in gens]))
        for t in range(m):
            it = b0 + t
            c = coord[:, t]
            is_x = c < n
            idx = np.where(is_x, c, c - n)
            old = np.where(is_x, X[rows, idx], Y[rows, idx])
            new = old + scale * step[:, t]
            delta = np.empty(num_chains)
            if is_x.any():
                r_ = rows[is_x]
                delta[is_x] = (_row_energy(kernel, new[is_x], Y[r_], True)
                               - _row_energy(kernel, old[is_x], Y[r_], True))
            if (~is_x).any():
                r_ = rows[~is_x]
                delta[~is_x] = (_row_energy(kernel, new[~is_x], X[r_], False)
                                - _row_energy(kernel, old[~is_x], X[r_], False))
            delta = np.where(np.isnan(delta), np.inf, delta)
            acc = logu[:, t] < -delta
            ax, ay = acc & is_x, acc & ~is_x
            X[rows[ax], idx[ax]] = new[ax]
            Y[rows[ay], idx[ay]] = new[ay]
            energy = np.where(acc, energy + np.where(acc, delta, 0.0), energy)
            if it < cfg.burn_in:
                if cfg.adapt:
                    gain = 1.0 / math.sqrt(it + 1.0)
                    scale = scale * np.exp(gain * (acc - cfg.target_acceptance))
            else:
                accepted += acc
                if (it - cfg.burn_in) % cfg.thinning == 0:
                    e_sum += energy
                    e_sq += energy * energy
                    e_cnt += 1

    # recompute exactly to shed accumulated rounding from the running sums
    final = kernel.eval_k(X[:, :, None], Y[:, None, :]).sum(axis=(1, 2))
    acc_rate = accepted / post
    mean = e_sum / e_cnt
    std = np.sqrt(np.maximum(e_sq / e_cnt - mean * mean, 0.0))
    flags = []
    bad = (acc_rate < 0.05) | (acc_rate > 0.95)
    if bad.any():
        flags.append(f"acceptance outside [0.05, 0.95] in {int(bad.sum())} of {num_chains} chains")
    diag = McmcDiagnostics(acc_rate, mean, std, final, scale, X0, Y0, flags)
    return X, Y, diag


def sample_mcmc(kernel: InteractionKernel, n: int, cfg: McmcConfig) -> tuple[Ensemble, McmcDiagnostics]:
    X, Y, diag = sample_mcmc_batch(kernel, n, cfg, 1)
    info = {"sampler": "mcmc", "kernel": kernel.spec, "seed": cfg.seed, "steps": cfg.steps}
    return Ensemble(n, X[0], Y[0], info), diag


def draw_ensembles(spec, n: int, num: int, rng_seed=0) -> tuple[np.ndarray, np.ndarray]:
    """``num`` independent draws for a varadhan.SamplerSpec, as (num, n) arrays."""
    method = spec.method
    if method == "auto":
        method = "exact" if spec.kernel.kind == "gaussian" else "mcmc"
    if method == "exact":
        if spec.kernel.kind != "gaussian":
            raise ValueError("the exact sampler exists only for the gaussian kernel")
        return sample_gaussian_batch(spec.kernel.params["theta"], n, num, stream(rng_seed, "exact", n))
    cfg = spec.mcmc if spec.mcmc is not None else McmcConfig.default(n, seed=rng_seed)
    X, Y, _ = sample_mcmc_batch(spec.kernel, n, cfg, num)
    return X, Y
