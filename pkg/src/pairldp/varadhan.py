"""Test functionals Phi on measures and the variational problem sup {Phi - K} over product measures.

A ``MinFunctional`` is Phi(mu) = min_r iint F_r d mu for bounded continuous
F_r.  On a product of atomic measures p (on xs) and q (on ys) it equals
min_r p^T F_r q, so the variational problem on a finite grid is

    sup_{p, q in simplices}  min_r  p^T (F_r - K) q,

concave in each factor separately (minimum of linear functions) but not
jointly.  ``varadhan_sup`` solves it by alternating multiplicative-weights
(entropic mirror) ascent from random Dirichlet starts, then polishes each
start by exact alternating block maximisation (one small LP per block).
The returned value is always Phi - K evaluated at the returned measure, so
it is a certified lower bound on the grid-restricted supremum.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from .energy import BivariateAtomic, RateContext
from .kernel import InteractionKernel
from .measure import ProductMeasure, atomic, empirical
from .streams import stream


class IterationLimitWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TestFunction:
    """Bounded continuous F(x, y) with a declared sup-norm bound."""

    __test__ = False  # not a pytest class

    fn: Callable
    bound: float
    name: str = "F"

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.broadcast_to(np.asarray(self.fn(x, y), dtype=float), np.broadcast(x, y).shape)


def constant(c: float) -> TestFunction:
    return TestFunction(lambda x, y: np.full(np.broadcast(x, y).shape, float(c)), abs(float(c)), f"const({c})")


def clamp_x(lo: float = -1.0, hi: float = 1.0) -> TestFunction:
    return TestFunction(lambda x, y: np.clip(x, lo, hi) + 0.0 * y, max(abs(lo), abs(hi)), f"clamp_x({lo},{hi})")


def clamp_y(lo: float = -1.0, hi: float = 1.0) -> TestFunction:
    return TestFunction(lambda x, y: np.clip(y, lo, hi) + 0.0 * x, max(abs(lo), abs(hi)), f"clamp_y({lo},{hi})")


def clamp_product(lo: float = -1.0, hi: float = 1.0) -> TestFunction:
    m = max(abs(lo), abs(hi))
    return TestFunction(lambda x, y: np.clip(x, lo, hi) * np.clip(y, lo, hi), m * m, f"clamp_xy({lo},{hi})")


def gaussian_bump(cx: float, cy: float, width: float = 1.0, height: float = 1.0) -> TestFunction:
    def F(x, y):
        return height * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * width * width))
    return TestFunction(F, abs(height), f"bump({cx},{cy},{width},{height})")


def truncated_kernel(kernel: InteractionKernel, M: float) -> TestFunction:
    """min(M, k), bounded by max(M, C)."""
    def F(x, y):
        return np.minimum(M, kernel.eval_k(x, y))
    return TestFunction(F, max(abs(M), kernel.lower_bound_C), f"min({M},k)")


def scaled(F: TestFunction, a: float) -> TestFunction:
    return TestFunction(lambda x, y: a * F.fn(x, y), abs(a) * F.bound, f"{a}*{F.name}")


@dataclass(frozen=True)
class MinFunctional:
    """Phi(mu) = min_r iint F_r d mu."""

    components: tuple

    def __init__(self, components: Sequence[TestFunction]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a MinFunctional needs at least one component")
        object.__setattr__(self, "components", comps)

    @property
    def sup_bound(self) -> float:
        return max(F.bound for F in self.components)

    def product_matrices(self, xs, ys) -> np.ndarray:
        """Stack of F_r(xs[i], ys[j]); Phi(p x q) = min_r p^T M_r q."""
        xs = np.asarray(xs, dtype=float)[:, None]
        ys = np.asarray(ys, dtype=float)[None, :]
        return np.stack([F(xs, ys) for F in self.components])

    def on_bivariate(self, mu: BivariateAtomic) -> float:
        return min(mu.integrate(F) for F in self.components)

    def validate(self, box, num: int = 10_000, seed=0) -> bool:
        """Sample points in ``box`` and confirm no component exceeds its bound."""
        rng = stream(seed, "validate")
        x = rng.uniform(box[0], box[1], num)
        y = rng.uniform(box[2], box[3], num)
        return all(np.max(np.abs(F(x, y))) <= F.bound + 1e-12 for F in self.components)


_LIBRARY = {
    "const": (constant, ("c",)),
    "clamp_x": (clamp_x, ("lo", "hi")),
    "clamp_y": (clamp_y, ("lo", "hi")),
    "clamp_xy": (clamp_product, ("lo", "hi")),
    "bump": (gaussian_bump, ("cx", "cy", "width", "height")),
}


def parse_functional(spec: str, kernel: Optional[InteractionKernel] = None) -> MinFunctional:
    """Build a MinFunctional from ``name:key=val,...`` components joined by ``;``.

    Names: const(c), clamp_x(lo, hi), clamp_y(lo, hi), clamp_xy(lo, hi),
    bump(cx, cy, width, height) and trunc_k(M) (needs ``kernel``).  Every
    component also takes ``scale=a``.  Example: ``clamp_x:lo=-1,hi=1;const:c=0.5``.
    """
    comps = []
    for part in filter(None, (p.strip() for p in spec.split(";"))):
        name, _, rest = part.partition(":")
        name = name.strip()
        kw = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, eq, val = item.partition("=")
            if not eq:
                raise ValueError(f"bad functional parameter {item!r}")
            kw[key.strip()] = float(val)
        a = kw.pop("scale", None)
        if name == "trunc_k":
            if kernel is None:
                raise ValueError("trunc_k needs a kernel")
            if set(kw) - {"M"}:
                raise ValueError(f"unknown trunc_k parameters {sorted(set(kw) - {'M'})}")
            F = truncated_kernel(kernel, kw.get("M", 1.0))
        elif name in _LIBRARY:
            ctor, allowed = _LIBRARY[name]
            if set(kw) - set(allowed):
                raise ValueError(f"unknown {name} parameters {sorted(set(kw) - set(allowed))}")
            F = ctor(**kw)
        else:
            raise ValueError(f"unknown test function {name!r}")
        comps.append(scaled(F, a) if a is not None else F)
    return MinFunctional(comps)


def parse_grid(spec) -> tuple:
    """``lo:hi:num`` (inclusive linspace) or a comma list / sequence of atoms."""
    if not isinstance(spec, str):
        return tuple(float(v) for v in spec)
    if ":" in spec:
        lo, hi, num = spec.split(":")
        return tuple(float(v) for v in np.linspace(float(lo), float(hi), int(num)))
    return tuple(float(v) for v in spec.split(",") if v.strip())


@dataclass(frozen=True)
class CovarianceFunctional:
    """Phi_b(mu) = b (iint F(x)G(y) dmu - int F dmu * int G dmu); zero on every product measure."""

    F: Callable
    G: Callable
    b: float

    def product_matrices(self, xs, ys) -> np.ndarray:
        # on p x q both terms equal (p.F)(q.G): one identically zero component
        return np.zeros((1, np.size(xs), np.size(ys)))

    def on_bivariate(self, mu: BivariateAtomic) -> float:
        Fx = np.asarray(self.F(mu.xs), dtype=float)
        Gy = np.asarray(self.G(mu.ys), dtype=float)
        W = mu.weight_matrix
        joint = float(Fx @ W @ Gy)
        return self.b * (joint - float(Fx @ W.sum(axis=1)) * float(W.sum(axis=0) @ Gy))


def phi(f, mu) -> float:
    """Evaluate a functional on a ProductMeasure or BivariateAtomic."""
    if isinstance(mu, BivariateAtomic):
        return f.on_bivariate(mu)
    M = f.product_matrices(mu.left.atoms, mu.right.atoms)
    p, q = mu.left.weights, mu.right.weights
    return float(np.min(np.einsum("i,rij,j->r", p, M, q)))


@dataclass(frozen=True)
class SimplexGrid:
    """Candidate atoms for the two factors and the optimiser budget."""

    support_points: tuple
    restarts: int = 20
    max_iters: int = 2000
    step_rule: str = "sqrt"  # "sqrt": eta_t = eta0/sqrt(t); "constant": eta_t = eta0
    right_points: Optional[tuple] = None
    polish_rounds: int = 50
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "support_points", tuple(sorted(float(s) for s in self.support_points)))
        if self.right_points is not None:
            object.__setattr__(self, "right_points", tuple(sorted(float(s) for s in self.right_points)))
        if self.step_rule not in ("sqrt", "constant"):
            raise ValueError("step_rule must be 'sqrt' or 'constant'")
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")

    @property
    def left(self) -> np.ndarray:
        return np.array(self.support_points)

    @property
    def right(self) -> np.ndarray:
        return np.array(self.right_points if self.right_points is not None else self.support_points)


class VaradhanResult(NamedTuple):
    value: float
    argmax: ProductMeasure


def objective_matrices(kernel: InteractionKernel, f, xs, ys) -> np.ndarray:
    """A_r = F_r - K on the grid; -inf where k = +inf."""
    K = np.asarray(kernel.eval_k(np.asarray(xs)[:, None], np.asarray(ys)[None, :]))
    K = np.where(np.isnan(K), np.inf, K)
    return f.product_matrices(xs, ys) - K[None, :, :]


def _values(A, P, Q):
    """min_r p^T A_r q for batched p (R, n), q (R, m); -inf if mass sits on an infinite pair."""
    finite = np.isfinite(A)
    v = np.einsum("si,rij,sj->sr", P, np.where(finite, A, 0.0), Q)
    inf_mass = np.einsum("si,rij,sj->sr", P, (~finite).astype(float), Q)
    v = np.where(inf_mass > 0, -np.inf, v)
    return v.min(axis=1)


def _penalised(A):
    """Finite surrogate of A: infinite-energy pairs get a value far below every finite one."""
    finite = A[np.isfinite(A)]
    if finite.size == 0:
        raise ValueError("k is infinite on every grid pair")
    span = float(finite.max() - finite.min())
    return np.where(np.isfinite(A), A, float(finite.min()) - 10.0 * span - 1.0), max(span, 1e-12)


def _mirror_ascent(Ap, span, P, Q, iters, step_rule):
    eta0 = 2.0 / span
    logP, logQ = np.log(P), np.log(Q)
    bestP, bestQ = P.copy(), Q.copy()
    best = _values(Ap, P, Q)
    for t in range(1, iters + 1):
        eta = eta0 / np.sqrt(t) if step_rule == "sqrt" else eta0
        # p-step with q fixed: supergradient A_{r*} q of the active component
        r = np.einsum("si,rij,sj->sr", P, Ap, Q).argmin(axis=1)
        logP = logP + eta * np.einsum("sij,sj->si", Ap[r], Q)
        logP -= logsumexp(logP, axis=1, keepdims=True)
        P = np.exp(logP)
        # q-step with the new p
        r = np.einsum("si,rij,sj->sr", P, Ap, Q).argmin(axis=1)
        logQ = logQ + eta * np.einsum("si,sij->sj", P, Ap[r])
        logQ -= logsumexp(logQ, axis=1, keepdims=True)
        Q = np.exp(logQ)
        cur = _values(Ap, P, Q)
        better = cur > best
        best = np.where(better, cur, best)
        bestP[better], bestQ[better] = P[better], Q[better]
    return bestP, bestQ


def _block_lp(B):
    """max over the simplex of min_r (B p)_r, for B of shape (m, n)."""
    m, n = B.shape
    if m == 1:
        p = np.zeros(n)
        p[int(np.argmax(B[0]))] = 1.0
        return p
    # variables (p, t): maximise t s.t. t <= (B p)_r, sum p = 1
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-B, np.ones((m, 1))])
    A_eq = np.concatenate([np.ones(n), [0.0]])[None, :]
    res = optimize.linprog(
        c, A_ub=A_ub, b_ub=np.zeros(m), A_eq=A_eq, b_eq=[1.0],
        bounds=[(0, None)] * n + [(None, None)], method="highs",
    )
    if res.status != 0:
        return None
    p = np.where(res.x[:n] > 1e-15, res.x[:n], 0.0)
    return p / p.sum()


def _polish(Ap, p, q, rounds):
    """Exact alternating block maximisation; returns (p, q, value, converged)."""
    def value(p, q):
        return _values(Ap, p[None], q[None])[0]

    val = value(p, q)
    for _ in range(rounds):
        start = val
        p_new = _block_lp(np.einsum("rij,j->ri", Ap, q))
        if p_new is not None and value(p_new, q) >= val:
            p, val = p_new, value(p_new, q)
        q_new = _block_lp(np.einsum("i,rij->rj", p, Ap))
        if q_new is not None and value(p, q_new) >= val:
            q, val = q_new, value(p, q_new)
        if val - start <= 1e-13 * max(1.0, abs(val)):
            return p, q, val, True
    return p, q, val, False


def varadhan_sup(kernel: InteractionKernel, f, grid: SimplexGrid) -> VaradhanResult:
    """sup of Phi(p x q) - K(p x q) over atomic products supported on the grid."""
    xs, ys = grid.left, grid.right
    A = objective_matrices(kernel, f, xs, ys)
    Ap, span = _penalised(A)
    rng = stream(grid.seed, "varadhan")
    R = grid.restarts
    P = np.clip(rng.dirichlet(np.ones(xs.size), size=R), 1e-300, None)
    Q = np.clip(rng.dirichlet(np.ones(ys.size), size=R), 1e-300, None)
    P, Q = _mirror_ascent(Ap, span, P, Q, grid.max_iters, grid.step_rule)

    # best pure pair as one extra deterministic start
    pure = Ap.min(axis=0)
    i, j = np.unravel_index(np.argmax(pure), pure.shape)
    e_p, e_q = np.zeros(xs.size), np.zeros(ys.size)
    e_p[i], e_q[j] = 1.0, 1.0
    starts = [(P[s], Q[s]) for s in range(R)] + [(e_p, e_q)]

    best, best_pq, all_converged = -np.inf, None, True
    for p, q in starts:
        p, q, _, conv = _polish(Ap, p, q, grid.polish_rounds)
        all_converged &= conv
        v = _values(A, p[None], q[None])[0]  # certificate on the true objective
        if best_pq is None or v > best:
            best, best_pq = v, (p, q)
    if not all_converged:
        warnings.warn("alternating polish hit its round limit; value is the best found so far",
                      IterationLimitWarning, stacklevel=2)
    p, q = best_pq
    keep_p, keep_q = p > 0, q > 0
    argmax = ProductMeasure(atomic(xs[keep_p], p[keep_p]), atomic(ys[keep_q], q[keep_q]))
    return VaradhanResult(float(best), argmax)


def L_of_phi(ctx: RateContext, f, grid: SimplexGrid) -> float:
    """sup {Phi - K} + I0 over grid products."""
    return varadhan_sup(ctx.kernel, f, grid).value + ctx.I0


# --------------------------------------------------------------------------
# Monte-Carlo counterpart

@dataclass(frozen=True)
class SamplerSpec:
    kernel: InteractionKernel
    method: str = "auto"  # "exact" (gaussian only), "mcmc", or "auto"
    mcmc: Optional[object] = None  # sampler.McmcConfig


class MgfEstimate(NamedTuple):
    estimate: float
    stderr: float


def mc_log_mgf(sampler_spec: SamplerSpec, f, n: int, num_samples: int, rng_seed=0) -> MgfEstimate:
    """(1/n^2) log of the sample mean of exp(n^2 Phi(mu_n)), with delta-method stderr."""
    from .sampler import draw_ensembles

    X, Y = draw_ensembles(sampler_spec, n, num_samples, rng_seed)
    if isinstance(f, MinFunctional):
        # Phi(mu_n) = min_r (1/n^2) sum_ij F_r(x_i, y_j)
        vals = np.min([F(X[:, :, None], Y[:, None, :]).mean(axis=(1, 2)) for F in f.components], axis=0)
    else:
        vals = np.array([phi(f, empirical(_Pair(x, y))[0]) for x, y in zip(X, Y)])
    top = float(vals.max())
    w = np.exp(n * n * (vals - top))
    mean = float(w.mean())
    est = top + np.log(mean) / (n * n)
    se = float(w.std(ddof=1) / np.sqrt(w.size) / mean / (n * n)) if w.size > 1 else float("nan")
    return MgfEstimate(float(est), se)


class _Pair(NamedTuple):
    x: np.ndarray
    y: np.ndarray


# --------------------------------------------------------------------------
# divergence of the rate off product measures

class DivergenceRow(NamedTuple):
    b: float
    delta: float
    lower_bound: float
    L_phi_b: float


def nonproduct_divergence(
    ctx: RateContext,
    mu0: BivariateAtomic,
    F: Callable,
    G: Callable,
    b_values: Sequence[float],
    grid: SimplexGrid,
) -> list[DivergenceRow]:
    """Lower bounds Phi_b(mu0) - L(Phi_b) = b*delta - L(Phi_b) on the rate of a non-product mu0."""
    delta = CovarianceFunctional(F, G, 1.0).on_bivariate(mu0)
    if not delta > 1e-12:
        raise ValueError(
            f"correlation gap delta = {delta:.3g} is not positive; "
            "mu0 looks like a product for this (F, G) - pick functions exhibiting its dependence"
        )
    rows = []
    for b in b_values:
        if b <= 0:
            raise ValueError("b must be positive")
        L = L_of_phi(ctx, CovarianceFunctional(F, G, float(b)), grid)
        rows.append(DivergenceRow(float(b), float(delta), float(b) * delta - L, L))
    return rows
