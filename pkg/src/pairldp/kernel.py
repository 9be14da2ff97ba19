"""Interaction kernels g(x, y) = exp(-k(x, y)) and desk-scale checks of their hypotheses.

Three families are provided:

* ``gaussian_kernel(theta)``: k = x^2 + y^2 - 2 theta x y, |theta| < 1;
* ``loggas_kernel(beta, V, W)``: k = V(x) + W(y) - beta log|x - y|;
* ``custom_kernel(k, beta, ...)``: any user supplied vectorised k.

``eval_k`` returns extended reals: +inf is an ordinary value (g = 0 there),
never an error.  All callables must accept and return numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy import optimize

Box = tuple[float, float, float, float]  # (x_lo, x_hi, y_lo, y_hi)


class ConvergenceError(RuntimeError):
    """A local refinement failed to certify its result."""


def square(u):
    return np.square(u)


def quartic(u):
    return np.square(np.square(u))


POTENTIALS: dict[str, Callable] = {"square": square, "quartic": quartic}


@dataclass(frozen=True, eq=False)
class InteractionKernel:
    kind: str
    params: dict
    beta: float
    lower_bound_C: float
    search_box: Box
    k_fn: Callable = field(repr=False)
    # beta*log|x-y| + k, continuous across the diagonal by assumption
    smooth_fn: Optional[Callable] = field(default=None, repr=False)

    def eval_k(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.asarray(self.k_fn(x, y), dtype=float)
        if out.ndim == 0:
            return float(out)
        return out

    def eval_g(self, x, y):
        k = self.eval_k(x, y)
        with np.errstate(over="ignore"):
            return np.exp(-np.asarray(k)) if np.ndim(k) else float(np.exp(-k))

    def smooth_part(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.smooth_fn is not None:
                out = self.smooth_fn(x, y)
            elif self.beta == 0:
                out = self.k_fn(x, y)
            else:
                out = self.beta * np.log(np.abs(x - y)) + self.k_fn(x, y)
        out = np.asarray(out, dtype=float)
        return float(out) if out.ndim == 0 else out

    @property
    def spec(self) -> str:
        """Compact ``kind:key=value,...`` description."""
        items = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind}:{items}" if items else self.kind

    def shifted(self, c: float) -> "InteractionKernel":
        """The kernel k + c (same minimiser, infimum moved by c)."""
        k_fn, s_fn = self.k_fn, self.smooth_fn
        return replace(
            self,
            kind="custom",
            params={**self.params, "shift": c},
            lower_bound_C=max(0.0, self.lower_bound_C - c),
            k_fn=lambda x, y: k_fn(x, y) + c,
            smooth_fn=None if s_fn is None else (lambda x, y: s_fn(x, y) + c),
        )


def gaussian_kernel(theta: float) -> InteractionKernel:
    theta = float(theta)
    if not abs(theta) < 1:
        raise ValueError(
            f"gaussian kernel needs |theta| < 1 (got {theta}); "
            "otherwise g is not integrable along x = theta*y"
        )
    R = 3.0 / (1.0 - abs(theta))

    def k(x, y):
        return x * x + y * y - 2.0 * theta * x * y

    return InteractionKernel(
        kind="gaussian",
        params={"theta": theta},
        beta=0.0,
        lower_bound_C=0.0,  # k = (x - theta y)^2 + (1 - theta^2) y^2 >= 0
        search_box=(-R, R, -R, R),
        k_fn=k,
        smooth_fn=k,
    )


def _level_interval(h: Callable, threshold: float, n: int = 4001) -> tuple[float, float]:
    """Smallest symmetric-grid interval containing {u : h(u) <= threshold}."""
    L = 1.0
    while L < 1e6:
        if h(np.array([-L, L])).min() > threshold:
            break
        L *= 2.0
    u = np.linspace(-L, L, n)
    inside = np.nonzero(h(u) <= threshold)[0]
    if inside.size == 0:
        raise ValueError("level set is empty; threshold below the minimum of h")
    step = u[1] - u[0]
    return float(u[inside[0]] - step), float(u[inside[-1]] + step)


def loggas_kernel(beta: float, V: Callable | str = "square", W: Callable | str = "square") -> InteractionKernel:
    """g(x, y) = |x - y|^beta exp(-V(x) - W(y)).

    V and W must grow faster than log sqrt(1 + u^2); the caller asserts this,
    the search box construction relies on it.
    """
    beta = float(beta)
    if beta < 0:
        raise ValueError(f"beta must be non-negative (got {beta})")
    v_name = V if isinstance(V, str) else getattr(V, "__name__", "V")
    w_name = W if isinstance(W, str) else getattr(W, "__name__", "W")
    Vf = POTENTIALS[V] if isinstance(V, str) else V
    Wf = POTENTIALS[W] if isinstance(W, str) else W

    if beta == 0:
        def k(x, y):
            return Vf(x) + Wf(y)
    else:
        def k(x, y):
            return Vf(x) + Wf(y) - beta * np.log(np.abs(x - y))

    def smooth(x, y):
        return Vf(x) + Wf(y)

    # level-set bound: k >= hV(x) + hW(y)
    def hV(u):
        return Vf(u) - 0.5 * beta * np.log1p(u * u)

    def hW(u):
        return Wf(u) - 0.5 * beta * np.log1p(u * u)

    u = np.linspace(-50, 50, 20001)
    minV, minW = float(np.min(hV(u))), float(np.min(hW(u)))
    bx = _level_interval(hV, minV + 10.0)
    by = _level_interval(hW, minW + 10.0)
    X, Y = np.meshgrid(np.linspace(*bx, 41), np.linspace(*by, 41), indexing="ij")
    with np.errstate(divide="ignore"):
        a_cert = float(np.min(k(X, Y)))
    box = _level_interval(hV, a_cert - minW + 10.0) + _level_interval(hW, a_cert - minV + 10.0)

    kern = InteractionKernel(
        kind="loggas",
        params={"beta": beta, "V": v_name, "W": w_name},
        beta=beta,
        lower_bound_C=0.0,
        search_box=box,
        k_fn=k,
        smooth_fn=smooth,
    )
    return _with_certified_C(kern)


def custom_kernel(
    k: Callable,
    beta: float = 0.0,
    search_box: Box = (-10.0, 10.0, -10.0, 10.0),
    lower_bound_C: Optional[float] = None,
    name: str = "custom",
) -> InteractionKernel:
    """Wrap an arbitrary vectorised k(x, y); C is grid-certified when not given."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    kern = InteractionKernel(
        kind="custom",
        params={"name": name, "beta": float(beta)},
        beta=float(beta),
        lower_bound_C=0.0 if lower_bound_C is None else float(lower_bound_C),
        search_box=tuple(float(b) for b in search_box),
        k_fn=k,
    )
    return kern if lower_bound_C is not None else _with_certified_C(kern)


def _with_certified_C(kern: InteractionKernel) -> InteractionKernel:
    value, _ = infimum_k(kern, tol=1e-10)
    # g <= e^C; C = 0 whenever k is already non-negative
    return replace(kern, lower_bound_C=max(0.0, -value + 1e-9))


def _scan(kernel: InteractionKernel, box: Box, num: int):
    xs = np.linspace(box[0], box[1], num)
    ys = np.linspace(box[2], box[3], num)
    K = kernel.eval_k(xs[:, None], ys[None, :])
    K = np.where(np.isnan(K), np.inf, K)
    return xs, ys, K


def infimum_k(
    kernel: InteractionKernel,
    tol: float = 1e-9,
    box: Optional[Box] = None,
    num: int = 401,
) -> tuple[float, tuple[float, float]]:
    """inf over the plane of k, by a ``num x num`` scan of the search box and Nelder-Mead polish."""
    box = kernel.search_box if box is None else box
    xs, ys, K = _scan(kernel, box, num)
    i, j = np.unravel_index(np.argmin(K), K.shape)
    grid_min = float(K[i, j])
    if not np.isfinite(grid_min):
        raise ConvergenceError("k is infinite on the whole scan grid")
    hx, hy = xs[1] - xs[0], ys[1] - ys[0]
    x0 = np.array([xs[i], ys[j]])

    def f(p):
        v = kernel.eval_k(p[0], p[1])
        return np.inf if np.isnan(v) else v

    simplex = np.array([x0, x0 + [hx, 0.0], x0 + [0.0, hy]])
    res = optimize.minimize(
        f, x0, method="Nelder-Mead",
        options={"xatol": tol, "fatol": tol * 1e-3, "initial_simplex": simplex, "maxiter": 10000},
    )
    if not np.isfinite(res.fun) or res.fun > grid_min + 1e-12:
        raise ConvergenceError(
            f"refinement stalled at {res.fun} above grid certificate {grid_min}"
        )
    return float(res.fun), (float(res.x[0]), float(res.x[1]))


def diagonal_infimum(kernel: InteractionKernel, tol: float = 1e-10) -> tuple[float, float]:
    """inf over x of k(x, x); equals the planar infimum for negative definite k."""
    lo = max(kernel.search_box[0], kernel.search_box[2])
    hi = min(kernel.search_box[1], kernel.search_box[3])
    u = np.linspace(lo, hi, 4001)
    vals = kernel.eval_k(u, u)
    i = int(np.argmin(vals))
    a, b = u[max(i - 1, 0)], u[min(i + 1, u.size - 1)]
    res = optimize.minimize_scalar(
        lambda t: kernel.eval_k(t, t), bounds=(a, b), method="bounded", options={"xatol": tol}
    )
    if res.fun <= vals[i]:
        return float(res.fun), float(res.x)
    return float(vals[i]), float(u[i])


# --------------------------------------------------------------------------
# assumption checks

@dataclass
class AssumptionResult:
    passed: Optional[bool]  # None: cannot certify either way
    detail: str


@dataclass
class AssumptionReport:
    kernel: str
    results: dict[str, AssumptionResult]
    M_alpha: dict[float, float]

    @property
    def all_passed(self) -> bool:
        return all(r.passed is True for r in self.results.values())

    def failed(self) -> list[str]:
        return [name for name, r in self.results.items() if r.passed is False]

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "all_passed": self.all_passed,
            "results": {k: {"passed": v.passed, "detail": v.detail} for k, v in self.results.items()},
            "M_alpha": {str(a): m for a, m in self.M_alpha.items()},
        }


def check_assumptions(
    kernel: InteractionKernel,
    alphas=(0.5, 1.0),
    resolution: int = 50,
    levels=(1.0, 10.0, 100.0),
) -> AssumptionReport:
    """Numeric spot checks of the five kernel hypotheses.

    The plane is sampled on boxes of half-width R0 * 2^m, m = 0..3, where R0
    covers the search box; ``resolution`` is the number of grid steps per R0.
    """
    b = kernel.search_box
    R0 = max(abs(v) for v in b)
    rings = [R0 * 2.0 ** m for m in range(4)]
    h = R0 / resolution
    u = np.arange(-rings[-1], rings[-1] + 0.5 * h, h)
    X, Y = np.meshgrid(u, u, indexing="ij")
    K = kernel.eval_k(X, Y)
    sup = np.maximum(np.abs(X), np.abs(Y))
    ring_id = np.searchsorted(np.array(rings), sup, side="left")  # 0 = inner box
    results: dict[str, AssumptionResult] = {}

    with np.errstate(over="ignore", invalid="ignore"):
        G = np.exp(-K)
    bad = np.isnan(G) | (G < 0)
    results["A1"] = AssumptionResult(not bool(bad.any()), f"{int(bad.sum())} grid points with g < 0 or undefined")

    M_alpha: dict[float, float] = {}
    verdicts, notes = [], []
    for a in alphas:
        with np.errstate(over="ignore", invalid="ignore"):
            Ga = np.where(np.isnan(K), 0.0, np.exp(-a * K))
        if not np.all(np.isfinite(Ga)):
            verdicts.append(False)
            notes.append(f"alpha={a}: g^alpha not finite")
            continue
        parts = np.array([Ga[ring_id == m].sum() * h * h for m in range(4)])
        total = float(parts.sum())
        M_alpha[float(a)] = total
        A1, A2, A3 = parts[1:]
        if A3 <= 1e-10 * total:
            v = True
        elif A2 <= 0.5 * A1 and A3 <= 0.5 * A2:
            v = True
        elif A3 >= 0.9 * A2:
            v = False
        else:
            v = None
        verdicts.append(v)
        notes.append(f"alpha={a}: M~{total:.6g}, annuli {A1:.3g},{A2:.3g},{A3:.3g}")
    if any(v is False for v in verdicts):
        a2 = False
    elif all(v is True for v in verdicts):
        a2 = True
    else:
        a2 = None
    results["A2"] = AssumptionResult(a2, "; ".join(notes))

    C = kernel.lower_bound_C
    kmin = float(np.nanmin(K))
    results["A3"] = AssumptionResult(bool(kmin >= -C - 1e-9), f"min k on grid {kmin:.6g} vs -C = {-C:.6g}")

    outer = ring_id == 3
    escaping = [a for a in levels if np.any(outer & (K <= a))]
    results["A4"] = AssumptionResult(
        not escaping,
        "level sets bounded for a in %s" % (list(levels),) if not escaping
        else f"level sets reach radius {rings[2]:.3g}+ for a in {escaping}",
    )

    results["A5"] = _check_diagonal_continuity(kernel)
    return AssumptionReport(kernel.spec, results, M_alpha)


def _check_diagonal_continuity(kernel: InteractionKernel) -> AssumptionResult:
    b = kernel.search_box
    lo, hi = max(b[0], b[2]), min(b[1], b[3])
    t = np.linspace(lo, hi, 25)
    scale = max(hi - lo, 1.0)
    ds = scale * 10.0 ** -np.arange(1, 8)
    plus = np.array([kernel.smooth_part(t + d, t) for d in ds])
    minus = np.array([kernel.smooth_part(t - d, t) for d in ds])
    if not (np.all(np.isfinite(plus)) and np.all(np.isfinite(minus))):
        return AssumptionResult(False, "smooth part not finite near the diagonal")
    incr = np.maximum(np.abs(np.diff(plus, axis=0)).max(axis=1), np.abs(np.diff(minus, axis=0)).max(axis=1))
    jump = float(np.max(np.abs(plus[-1] - minus[-1])))
    ok = bool(incr[-1] <= 1e-3 and jump <= 1e-3)
    return AssumptionResult(ok, f"last Cauchy increment {incr[-1]:.3g}, jump across diagonal {jump:.3g}")


def parse_kernel(spec: str) -> InteractionKernel:
    """Build a kernel from ``gaussian:theta=0.5`` or ``loggas:beta=2,V=square,W=square``.

    Either kind accepts ``box=x0:x1:y0:y1`` to override the search box.
    """
    kind, _, rest = spec.strip().partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"bad kernel parameter {item!r}")
        params[key.strip()] = val.strip()
    box = params.pop("box", None)
    allowed = {"gaussian": {"theta"}, "loggas": {"beta", "V", "W"}}
    if kind not in allowed:
        raise ValueError(f"unknown kernel kind {kind!r}")
    extra = set(params) - allowed[kind]
    if extra:
        raise ValueError(f"unknown {kind} parameters {sorted(extra)}")
    if kind == "gaussian":
        kern = gaussian_kernel(float(params.get("theta", 0.0)))
    else:
        kern = loggas_kernel(float(params.get("beta", 0.0)), params.get("V", "square"), params.get("W", "square"))
    if box is not None:
        b = tuple(float(v) for v in box.split(":"))
        if len(b) != 4 or not (b[0] < b[1] and b[2] < b[3]):
            raise ValueError(f"box must be x0:x1:y0:y1 with x0 < x1, y0 < y1 (got {box!r})")
        kern = replace(kern, search_box=b, params={**kern.params, "box": box})
    return kern
