"""Invariants as hypothesis properties."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from oracles import lattice_sup
from pairldp.cli import RunConfig
from pairldp.energy import (BivariateAtomic, RateContext, average_rate, check_2K, energy_K, marginal_rate,
                            quadratic_form, rank_one_split, rate)
from pairldp.experiment import EventSpec, predicted_rate
from pairldp.kernel import gaussian_kernel, loggas_kernel
from pairldp.measure import (AtomicMeasure, ProductMeasure, atomic, density_on_grid, log_plus_bound,
                             log_plus_expectation, moment, quantile_partition, smooth)
from pairldp.sampler import log_partition_gaussian, sample_gaussian_batch
from pairldp.streams import stream
from pairldp.varadhan import (MinFunctional, SimplexGrid, clamp_product, clamp_x, clamp_y, constant,
                              gaussian_bump, scaled, varadhan_sup)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
weight = st.floats(0.01, 1.0)


@st.composite
def measures(draw, max_atoms=5):
    k = draw(st.integers(1, max_atoms))
    pts = draw(st.lists(finite, min_size=k, max_size=k))
    ws = draw(st.lists(weight, min_size=k, max_size=k))
    return atomic(pts, ws)


thetas = st.floats(-0.95, 0.95)
nonneg_thetas = st.floats(0.0, 0.95)

CTX = {th: RateContext.from_kernel(gaussian_kernel(th)) for th in (-0.5, 0.0, 0.25, 0.5, 0.75)}
LOGGAS2 = RateContext.from_kernel(loggas_kernel(2.0))


# ---- measures ----

@given(st.lists(finite, min_size=1, max_size=8), st.data())
def test_atomic_normalised(pts, data):
    ws = data.draw(st.lists(weight, min_size=len(pts), max_size=len(pts)))
    nu = atomic(pts, ws)
    assert np.all(np.diff(nu.atoms) > 0)
    assert abs(nu.weights.sum() - 1) <= 1e-12
    assert set(nu.atoms) == set(pts)


@given(measures())
def test_measure_serialisation_lossless(nu):
    assert AtomicMeasure.from_csv(nu.to_csv()) == nu
    assert AtomicMeasure.from_json(nu.to_json()) == nu


@given(measures(), st.floats(0.05, 1.0), st.sampled_from([8, 16, 32]))
def test_smoothing_moments(nu, eps, div):
    step = eps / div
    d = smooth(nu, eps, step)
    assert abs(d.mass() - 1) <= 1e-9
    assert abs(d.moment(1) - moment(nu, 1)) <= 1e-9
    excess = d.moment(2) - moment(nu, 2) - eps * eps / 3
    assert -1e-9 <= excess <= step * step / 4 + 1e-9


@given(st.integers(1, 12), st.floats(-1.0, 1.0), st.floats(0.3, 2.0))
def test_quantile_partition_equal_cells(n, shift, width):
    d = density_on_grid(lambda x: np.exp(-((x - shift) / width) ** 2), -6.0, 6.0, 481)
    q = quantile_partition(d, n)
    assert np.all(np.diff(q) > 0)
    masses = np.diff(np.interp(q, d.grid, d.cdf()))
    # within a cell the cdf is quadratic; compare against the linear-interp cdf loosely and the sum exactly
    assert abs(masses.sum() - 1) <= 1e-9
    assert np.all(np.abs(masses - 1 / n) <= 5e-3)


@given(st.floats(1e-6, 1.0), st.floats(1e-3, 10.0), st.booleans())
def test_log_plus_bound(eps, z, neg):
    z = -z if neg else z
    assert log_plus_expectation(eps, z) <= log_plus_bound(eps, z) + 1e-10
    assert log_plus_expectation(eps, z) >= 0


# ---- kernels ----

@given(thetas, finite, finite)
def test_gaussian_g_and_lower_bound(th, x, y):
    kern = gaussian_kernel(th)
    k = kern.eval_k(x, y)
    assert k >= -kern.lower_bound_C - 1e-12
    assert kern.eval_g(x, y) == pytest.approx(math.exp(-k))


@given(st.floats(0.1, 4.0), finite, finite)
def test_loggas_lower_bound(beta, x, y):
    kern = loggas_kernel(beta)
    k = kern.eval_k(x, y)
    assert k >= beta / 2 * (1 - math.log(beta)) - 1e-9
    assert k >= -kern.lower_bound_C - 1e-9


# ---- energy and rates ----

@given(st.sampled_from(sorted(CTX)), measures(), measures())
def test_energy_closed_form_and_symmetry(th, a, b):
    kern = CTX[th].kernel
    e = energy_K(kern, ProductMeasure(a, b))
    want = moment(a, 2) + moment(b, 2) - 2 * th * moment(a, 1) * moment(b, 1)
    assert e == pytest.approx(want, abs=1e-12)
    assert e == pytest.approx(energy_K(kern, ProductMeasure(b, a)), abs=1e-12)


@given(st.sampled_from(sorted(CTX)), measures(), measures())
def test_rate_nonnegative(th, a, b):
    ctx = CTX[th]
    assert rate(ctx, ProductMeasure(a, b)) >= -ctx.I0_tol


@given(measures(), measures())
def test_rate_nonnegative_loggas(a, b):
    assert rate(LOGGAS2, ProductMeasure(a, b)) >= -LOGGAS2.I0_tol


@given(st.sampled_from(sorted(CTX)), measures(), finite)
def test_marginal_rate_is_infimum(th, nu, y):
    ctx = CTX[th]
    m = marginal_rate(ctx, nu)
    assert m == pytest.approx(moment(nu, 2) - th * th * moment(nu, 1) ** 2, abs=1e-6)
    assert m <= rate(ctx, ProductMeasure(nu, atomic([y]))) + 1e-9


@given(st.sampled_from([0.0, 0.25, 0.5, 0.75]), measures(), measures(), st.floats(0, 1))
def test_average_rate_concave(th, a, b, t):
    ctx = CTX[th]
    mix = a.mix(b, t)
    lhs = average_rate(ctx, mix)
    rhs = (1 - t) * average_rate(ctx, a) + t * average_rate(ctx, b)
    assert lhs >= rhs - 1e-9
    assert average_rate(ctx, a) == pytest.approx(2 * (moment(a, 2) - th * moment(a, 1) ** 2), abs=1e-12)


@given(nonneg_thetas, measures(), measures())
def test_two_K(th, a, b):
    assert check_2K(gaussian_kernel(th), a, b).holds


@given(thetas, st.lists(finite, min_size=2, max_size=6), st.data())
def test_negdef_form_identity(th, x, data):
    c = np.array(data.draw(st.lists(st.floats(-2, 2), min_size=len(x), max_size=len(x))))
    c = c - c.mean()
    v = quadratic_form(gaussian_kernel(th), x, c)
    assert v == pytest.approx(-2 * th * float(c @ np.array(x)) ** 2, abs=1e-9)


@given(measures(), measures())
def test_rank_one_outer_products(a, b):
    mu = BivariateAtomic.from_product(ProductMeasure(a, b))
    split = rank_one_split(mu)
    assert split.product is not None
    assert split.product.left == a or np.allclose(split.product.left.weights, a.weights, atol=1e-15)
    assert np.allclose(split.product.right.weights, b.weights, atol=1e-15)


@given(st.integers(2, 4), st.data())
def test_non_product_detected(k, data):
    # a permutation-like weight matrix of rank k >= 2
    xs = np.arange(k, dtype=float)
    mu = BivariateAtomic(xs, xs, np.eye(k) / k)
    assert rank_one_split(mu).product is None


# ---- variational problem ----

COMPONENTS = [clamp_x(), clamp_y(), scaled(clamp_x(), -1.0), scaled(clamp_y(), -1.0), clamp_product(),
              gaussian_bump(0.5, -0.5), gaussian_bump(-1, 1, 0.7, 2.0), constant(0.3)]


@given(st.lists(st.sampled_from(range(len(COMPONENTS))), min_size=1, max_size=3, unique=True),
       st.lists(st.sampled_from([-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5]), min_size=2, max_size=3, unique=True),
       st.sampled_from([0.0, 0.5]))
def test_optimiser_beats_lattice(idx, pts, th):
    F = [COMPONENTS[i] for i in idx]
    kern = gaussian_kernel(th)
    pts = tuple(sorted(pts))
    got = varadhan_sup(kern, MinFunctional(F), SimplexGrid(pts, restarts=4, max_iters=200)).value
    oracle = lattice_sup(F, kern.eval_k, np.array(pts), np.array(pts))
    assert got >= oracle - 1e-3
    # any value is attained by a product measure, so it is bounded by sup|F| - inf k
    assert got <= max(c.bound for c in F) + kern.lower_bound_C + 1e-12


@given(st.floats(-3, 3), st.sampled_from([0.0, 0.5, 0.9]))
def test_constant_functional(c, th):
    kern = gaussian_kernel(th)
    res = varadhan_sup(kern, MinFunctional([constant(c)]), SimplexGrid((-1.0, 0.0, 1.0), restarts=2, max_iters=50))
    assert res.value == pytest.approx(c, abs=1e-12)


# ---- sampler and partition function ----

@given(thetas, st.integers(1, 20), st.integers(0, 2 ** 32 - 1))
def test_exact_sampler_reproducible(th, n, seed):
    a = sample_gaussian_batch(th, n, 3, stream(seed, "p"))
    b = sample_gaussian_batch(th, n, 3, stream(seed, "p"))
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert np.all(np.isfinite(a[0]))


@given(thetas, st.integers(9, 400))
def test_log_partition_normalised_decreasing(th, n):
    # (1/n^2)|log Z_n| = (n log(n/pi) + log(1 - theta^2)/2)/n^2 decreases once
    # n (log(n/pi) - 1) > -log(1 - theta^2): n >= 9 for |theta| <= 0.5, n >= 12 for |theta| <= 0.95
    assume(n >= 12 or abs(th) <= 0.5)
    f = lambda m: abs(log_partition_gaussian(th, m)) / (m * m)
    assert f(n + 1) < f(n)


# ---- experiment and configuration ----

@given(st.sampled_from([0.0, 0.25, 0.5, 0.75]), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_prediction_monotone_in_threshold(th, a, b):
    lo, hi = sorted((a, b))
    ctx = CTX[th]
    for stat in ("marginal_mean", "average_mean", "marginal_second_moment"):
        p_lo = predicted_rate(ctx, EventSpec(stat, lo))
        p_hi = predicted_rate(ctx, EventSpec(stat, hi))
        assert 0 <= p_lo <= p_hi


@given(st.sampled_from(["marginal_mean", "average_mean", "marginal_second_moment"]),
       st.floats(-10, 10, allow_nan=False), st.sampled_from([">=", "<="]))
def test_event_roundtrip(stat, a, d):
    e = EventSpec(stat, a, d)
    assert EventSpec.parse(str(e)) == e


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-10 ** 6, 10 ** 6) | st.floats(allow_nan=False, allow_infinity=False)
    | st.text(st.characters(blacklist_categories=("Cs", "Cc")), max_size=12),
    lambda inner: st.lists(inner, max_size=4),
    max_leaves=8,
)


@given(st.dictionaries(st.from_regex(r"[a-z][a-z_]{0,8}", fullmatch=True), json_values, max_size=5),
       st.integers(0, 2 ** 31), st.sampled_from(["csv", "json", None]))
def test_run_config_roundtrip(params, seed, fmt):
    cfg = RunConfig("ldp-verify", "gaussian:theta=0.5", params, seed=seed, format=fmt)
    back = RunConfig.from_ini(cfg.to_ini())
    assert back == cfg and back.digest() == cfg.digest()
