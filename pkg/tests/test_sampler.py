import math

import numpy as np
import pytest

from oracles import log_Z2_gauss_hermite
from pairldp.kernel import gaussian_kernel, loggas_kernel
from pairldp.measure import moment
from pairldp.sampler import (Ensemble, McmcConfig, log_density, log_partition_gaussian, sample_gaussian_batch,
                             sample_gaussian_exact, sample_mcmc, sample_mcmc_batch)
from pairldp.streams import stream
from pairldp.varadhan import SamplerSpec
from pairldp.sampler import draw_ensembles


def test_log_density_examples():
    assert log_density(gaussian_kernel(0.5), Ensemble(1, np.array([1.0]), np.array([2.0]))) == -3.0
    assert log_density(gaussian_kernel(0.0), Ensemble(2, np.ones(2), np.ones(2))) == -8.0
    assert log_density(loggas_kernel(1.0), Ensemble(1, np.zeros(1), np.zeros(1))) == -math.inf


def test_ensemble_shape_check_and_csv():
    with pytest.raises(ValueError):
        Ensemble(2, np.zeros(2), np.zeros(3))
    e = Ensemble(2, np.array([0.5, -1.0]), np.array([2.0, 0.25]))
    assert e.to_csv() == "index,x,y\n0,0.5,2.0\n1,-1.0,0.25\n"


# ---- exact sampler ----

def test_exact_theta0_coordinate_variance():
    n, N = 5, 100_000
    X, Y = sample_gaussian_batch(0.0, n, N, stream(1, "t"))
    for v in (X[:, 0], Y[:, 3]):
        s2 = v.var(ddof=1)
        target = 1 / (2 * n)
        assert abs(s2 - target) <= 3 * target * math.sqrt(2 / (N - 1))
    # off-diagonal covariance of coordinates is 0 at theta = 0
    c = np.cov(X[:, 0], X[:, 1])[0, 1]
    assert abs(c) <= 3 * (1 / (2 * n)) / math.sqrt(N)


def test_exact_sum_covariance():
    th, n, N = 0.5, 6, 100_000
    X, Y = sample_gaussian_batch(th, n, N, stream(2, "t"))
    S = np.stack([X.sum(1), Y.sum(1)])
    C = np.cov(S)
    want = 0.5 / (1 - th * th) * np.array([[1, th], [th, 1]])
    for i in range(2):
        for j in range(2):
            se = math.sqrt((want[i, i] * want[j, j] + want[i, j] ** 2) / (N - 1))
            assert abs(C[i, j] - want[i, j]) <= 3 * se


def test_exact_brute_force_covariance():
    # compare with the full 2n x 2n precision matrix of the density
    th, n, N = 0.3, 3, 200_000
    P = np.zeros((2 * n, 2 * n))
    P[:n, :n] = np.eye(n) * n
    P[n:, n:] = np.eye(n) * n
    P[:n, n:] = -th
    P[n:, :n] = -th
    want = np.linalg.inv(2 * P)
    X, Y = sample_gaussian_batch(th, n, N, stream(4, "t"))
    C = np.cov(np.hstack([X, Y]).T)
    se = np.sqrt((np.outer(np.diag(want), np.diag(want)) + want ** 2) / (N - 1))
    assert np.all(np.abs(C - want) <= 4 * se)


def test_exact_determinism():
    a = sample_gaussian_exact(0.5, 7, 11)
    b = sample_gaussian_exact(0.5, 7, 11)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
    assert not np.array_equal(a.x, sample_gaussian_exact(0.5, 7, 12).x)


def test_exact_rejects_theta():
    with pytest.raises(ValueError):
        sample_gaussian_exact(1.0, 3)


# ---- partition function ----

def test_log_partition_examples():
    assert log_partition_gaussian(0.5, 1) == pytest.approx(math.log(math.pi / math.sqrt(0.75)), abs=1e-12)
    assert log_partition_gaussian(0.5, 1) == pytest.approx(1.288571, abs=1e-6)
    for n in (1, 3, 10):
        assert log_partition_gaussian(0.0, n) == pytest.approx(n * math.log(math.pi / n), abs=1e-12)


@pytest.mark.parametrize("theta", [0.0, 0.5, -0.7])
def test_log_partition_quadrature(theta):
    k = gaussian_kernel(theta).eval_k
    assert log_partition_gaussian(theta, 2) == pytest.approx(log_Z2_gauss_hermite(k), abs=1e-6)


# ---- Metropolis ----

def test_mcmc_config_validation():
    with pytest.raises(ValueError):
        McmcConfig(10, 10)
    with pytest.raises(ValueError):
        McmcConfig(10, 2, thinning=0)
    with pytest.raises(ValueError):
        McmcConfig(10, 2, proposal_scale=0.0)
    d = McmcConfig.default(4, seed=3)
    assert d.burn_in == 160 and d.seed == 3


def test_mcmc_zero_scale_stays_put():
    cfg = McmcConfig(200, 50, proposal_scale=1e-320, seed=1)
    X, Y, diag = sample_mcmc_batch(loggas_kernel(2.0), 3, cfg, 4)
    assert np.array_equal(X, diag.initial_x) and np.array_equal(Y, diag.initial_y)


def test_mcmc_matches_exact_moments():
    th, n, R = 0.5, 8, 1000
    kern = gaussian_kernel(th)
    cfg = McmcConfig(steps=10 * n * n + 3000, burn_in=10 * n * n, seed=5)
    Xm, _, diag = sample_mcmc_batch(kern, n, cfg, R)
    Xe, _ = sample_gaussian_batch(th, n, R, stream(6, "t"))
    assert not diag.flags
    for stat in (lambda X: X.mean(1), lambda X: (X * X).mean(1)):
        a, b = stat(Xm), stat(Xe)
        se = math.sqrt(a.var(ddof=1) / R + b.var(ddof=1) / R)
        assert abs(a.mean() - b.mean()) <= 3 * se


def test_mcmc_loggas_finite_energy():
    kern = loggas_kernel(2.0)
    cfg = McmcConfig.default(4, seed=9)
    X, Y, diag = sample_mcmc_batch(kern, 4, cfg, 50)
    for x, y in zip(X, Y):
        assert np.isfinite(log_density(kern, Ensemble(4, x, y)))
    assert np.all((diag.acceptance_rate > 0.05) & (diag.acceptance_rate < 0.95))
    assert np.allclose(diag.final_energy, [-log_density(kern, Ensemble(4, x, y)) for x, y in zip(X, Y)])


def test_mcmc_determinism_and_chain_independence():
    kern = gaussian_kernel(0.2)
    cfg = McmcConfig(400, 100, seed=4)
    X1, Y1, _ = sample_mcmc_batch(kern, 3, cfg, 3)
    X2, Y2, _ = sample_mcmc_batch(kern, 3, cfg, 5)
    # chain r depends on (seed, r) only, not on how many chains ran alongside
    assert np.array_equal(X1, X2[:3]) and np.array_equal(Y1, Y2[:3])
    e, _ = sample_mcmc(kern, 3, cfg)
    assert np.array_equal(e.x, X1[0])


def test_mcmc_adaptation_moves_scale():
    cfg = McmcConfig(3000, 2000, proposal_scale=5.0, adapt=True, seed=0)
    _, _, diag = sample_mcmc_batch(gaussian_kernel(0.0), 4, cfg, 4)
    assert np.all(diag.proposal_scale < 5.0)


def test_mcmc_flags_bad_acceptance():
    cfg = McmcConfig(600, 100, proposal_scale=50.0, seed=0)
    _, _, diag = sample_mcmc_batch(gaussian_kernel(0.0), 6, cfg, 2)
    assert diag.flags


def test_draw_ensembles_dispatch():
    X, Y = draw_ensembles(SamplerSpec(gaussian_kernel(0.1)), 3, 10, 0)
    assert X.shape == (10, 3)
    with pytest.raises(ValueError):
        draw_ensembles(SamplerSpec(loggas_kernel(1.0), method="exact"), 3, 2, 0)
    X, Y = draw_ensembles(SamplerSpec(loggas_kernel(1.0), mcmc=McmcConfig(200, 50)), 2, 3, 0)
    assert np.all(np.isfinite(X))
