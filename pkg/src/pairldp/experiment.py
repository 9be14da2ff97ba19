"""Rare-event decay rates at speed n^2 against their rate-function predictions."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import log_ndtr

from .energy import RateContext, marginal_rate
from .kernel import InteractionKernel
from .measure import atomic
from .sampler import McmcConfig, sample_gaussian_batch, sample_mcmc_batch
from .streams import stream

STATISTICS = ("marginal_mean", "average_mean", "marginal_second_moment")
CHUNK = 1 << 14  # samples per independent stream; fixed so results do not depend on worker count


class InfeasibleEventError(ValueError):
    pass


@dataclass(frozen=True)
class EventSpec:
    statistic: str
    threshold: float
    direction: str = ">="

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}; choose from {STATISTICS}")
        if self.direction not in (">=", "<="):
            raise ValueError("direction must be '>=' or '<='")

    @classmethod
    def parse(cls, text: str) -> "EventSpec":
        """Parse ``marginal_mean>=0.5``; thresholds may be ``inf``/``-inf``."""
        m = re.fullmatch(r"\s*(\w+)\s*(>=|<=)\s*(\S+)\s*", text)
        if not m:
            raise ValueError(f"cannot parse event {text!r}")
        try:
            a = float(m.group(3))
        except ValueError:
            raise ValueError(f"cannot parse threshold in event {text!r}") from None
        if math.isnan(a):
            raise ValueError("threshold must not be nan")
        return cls(m.group(1), a, m.group(2))

    def __str__(self):
        return f"{self.statistic}{self.direction}{self.threshold}"

    def statistic_values(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        if self.statistic == "marginal_mean":
            return X.mean(axis=-1)
        if self.statistic == "average_mean":
            return 0.5 * (X.mean(axis=-1) + Y.mean(axis=-1))
        return (X * X).mean(axis=-1)

    def hits(self, X, Y) -> np.ndarray:
        s = self.statistic_values(X, Y)
        return s >= self.threshold if self.direction == ">=" else s <= self.threshold


# --------------------------------------------------------------------------
# predictions

def _gaussian_prediction(theta: float, event: EventSpec) -> float:
    a = event.threshold
    up = event.direction == ">="
    if event.statistic in ("marginal_mean", "average_mean"):
        # rate is c * m1^2 once m2 = m1^2 (point masses): c = 1 - theta^2 for the marginal,
        # 2 (1 - theta) for the average (minimise a^2 + b^2 - 2 theta a b with (a + b)/2 fixed)
        c = 1.0 - theta * theta if event.statistic == "marginal_mean" else 2.0 * (1.0 - theta)
        if math.isinf(a):
            return 0.0 if (a < 0) == up else math.inf
        if (up and a <= 0) or (not up and a >= 0):
            return 0.0
        return c * a * a
    # marginal_second_moment: m2 - theta^2 m1^2 >= (1 - theta^2) m2
    if up:
        return 0.0 if a <= 0 else (1.0 - theta * theta) * a
    return 0.0 if a >= 0 else math.inf


def predicted_rate(ctx: RateContext, event: EventSpec, atoms: int = 15, levels: int = 5) -> float:
    """inf of the rate over measures in the event.

    Closed forms for the gaussian kernel.  Otherwise marginal statistics fall
    back to a search over 3-atom measures (atoms from a grid of the search
    box, weights on a lattice with ``levels`` steps): a heuristic that can
    only overestimate the infimum.
    """
    kern = ctx.kernel
    if kern.kind == "gaussian":
        return _gaussian_prediction(kern.params["theta"], event)
    if event.statistic == "average_mean":
        raise ValueError("average_mean predictions need the gaussian closed form")
    if math.isinf(event.threshold):
        up = event.direction == ">="
        return 0.0 if (event.threshold < 0) == up else math.inf
    pts = np.linspace(kern.search_box[0], kern.search_box[1], atoms)
    best = math.inf
    lattice = [(i, j, levels - i - j) for i in range(levels + 1) for j in range(levels + 1 - i)]
    for trip in itertools.combinations(pts, 3):
        trip = np.array(trip)
        for w in lattice:
            w = np.array(w, dtype=float) / levels
            stat = w @ trip if event.statistic == "marginal_mean" else w @ trip ** 2
            ok = stat >= event.threshold if event.direction == ">=" else stat <= event.threshold
            if ok:
                keep = w > 0
                best = min(best, marginal_rate(ctx, atomic(trip[keep], w[keep]), num=401))
    return best


def gaussian_tail_reference(theta: float, n: int, event: EventSpec) -> float:
    """Exact log P(event) for the gaussian ensemble and a marginal_mean event.

    The sample mean of x is N(0, 1 / (2 n^2 (1 - theta^2))).
    """
    if event.statistic != "marginal_mean":
        raise ValueError("the exact tail reference covers marginal_mean events only")
    if not abs(theta) < 1:
        raise ValueError("|theta| < 1 required")
    sigma = 1.0 / (n * math.sqrt(2.0 * (1.0 - theta * theta)))
    z = event.threshold / sigma
    return float(log_ndtr(-z) if event.direction == ">=" else log_ndtr(z))


# --------------------------------------------------------------------------
# Monte-Carlo decay

@dataclass
class DecayRow:
    n: int
    hits: int
    samples: int
    p_hat: float
    stderr: float
    neg_log_p_over_n2: float
    reference: Optional[float]  # exact probability, when available
    reference_neg_log_p_over_n2: Optional[float]


@dataclass
class DecayReport:
    kernel: str
    event: str
    rows: list
    predicted_rate: float
    method: str  # "direct_mc" or "exact_gaussian_tail"
    seed: int = 0
    meta: dict = field(default_factory=dict)

    COLUMNS = ("n", "p_hat", "stderr", "neg_log_p_over_n2", "reference", "predicted_rate",
               "reference_neg_log_p_over_n2", "hits", "samples")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow([r.n, repr(r.p_hat), repr(r.stderr), repr(r.neg_log_p_over_n2),
                        "" if r.reference is None else repr(r.reference), repr(self.predicted_rate),
                        "" if r.reference_neg_log_p_over_n2 is None else repr(r.reference_neg_log_p_over_n2),
                        r.hits, r.samples])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel, "event": self.event, "method": self.method,
            "predicted_rate": self.predicted_rate, "seed": self.seed, "meta": self.meta,
            "rows": [r.__dict__ for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def wilson_stderr(hits: int, N: int, z: float = 1.0) -> float:
    """Half-width of the Wilson score interval at z = 1 (one standard error)."""
    p = hits / N
    return math.sqrt(p * (1 - p) / N + z * z / (4 * N * N)) * z / (1 + z * z / N)


def _neg_log_over_n2(p: float, n: int) -> float:
    return math.inf if p <= 0 else -math.log(p) / (n * n)


def _count_hits(kernel, event, n, num, seed, chunk, mcmc: Optional[McmcConfig]):
    size = min(CHUNK, num - chunk * CHUNK)
    if kernel.kind == "gaussian":
        X, Y = sample_gaussian_batch(kernel.params["theta"], n, size, stream(seed, "decay", n, chunk))
    else:
        cfg = mcmc if mcmc is not None else McmcConfig.default(n)
        cfg = McmcConfig(cfg.steps, cfg.burn_in, cfg.proposal_scale, cfg.thinning,
                         seed + 7919 * chunk, cfg.adapt, cfg.target_acceptance)
        X, Y, _ = sample_mcmc_batch(kernel, n, cfg, size)
    return int(event.hits(X, Y).sum())


def decay_rate(
    kernel: InteractionKernel,
    event: EventSpec,
    n_values,
    num_samples: int,
    rng_seed: int = 0,
    workers: int = 1,
    ctx: Optional[RateContext] = None,
    mcmc: Optional[McmcConfig] = None,
) -> DecayReport:
    """Direct Monte-Carlo estimates of P(event) and -(1/n^2) log P across n."""
    n_values = sorted(int(n) for n in n_values)
    theta = kernel.params.get("theta") if kernel.kind == "gaussian" else None
    has_ref = theta is not None and event.statistic == "marginal_mean"
    if has_ref:
        feasible = [n for n in range(1, 4097) if gaussian_tail_reference(theta, n, event) >= math.log(10.0 / num_samples)]
        if n_values[0] not in feasible:
            largest = max(feasible) if feasible else None
            raise InfeasibleEventError(
                f"P({event}) at n={n_values[0]} is below 10/{num_samples}; "
                f"largest feasible n for direct Monte-Carlo is {largest}"
            )
    if ctx is None:
        ctx = RateContext.from_kernel(kernel)
    pred = predicted_rate(ctx, event)

    rows = []
    for n in n_values:
        chunks = range(math.ceil(num_samples / CHUNK))
        if workers > 1:
            with ThreadPoolExecutor(workers) as ex:
                counts = list(ex.map(lambda c: _count_hits(kernel, event, n, num_samples, rng_seed, c, mcmc), chunks))
        else:
            counts = [_count_hits(kernel, event, n, num_samples, rng_seed, c, mcmc) for c in chunks]
        hits = sum(counts)
        p = hits / num_samples
        ref = ref_rate = None
        if has_ref:
            lp = gaussian_tail_reference(theta, n, event)
            ref, ref_rate = math.exp(lp), -lp / (n * n)
        rows.append(DecayRow(n, hits, num_samples, p, wilson_stderr(hits, num_samples),
                             _neg_log_over_n2(p, n), ref, ref_rate))
    return DecayReport(kernel.spec, str(event), rows, pred, "direct_mc", rng_seed)


def exact_decay(theta: float, event: EventSpec, n_values) -> DecayReport:
    """The exact-reference sequence -(1/n^2) log P(n), no sampling."""
    from .kernel import gaussian_kernel

    rows = []
    for n in sorted(int(v) for v in n_values):
        lp = gaussian_tail_reference(theta, n, event)
        rows.append(DecayRow(n, 0, 0, math.exp(lp), 0.0, -lp / (n * n), math.exp(lp), -lp / (n * n)))
    return DecayReport(gaussian_kernel(theta).spec, str(event), rows,
                       _gaussian_prediction(theta, event), "exact_gaussian_tail")
