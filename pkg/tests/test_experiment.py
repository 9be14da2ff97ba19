import json
import math

import numpy as np
import pytest

from pairldp.energy import RateContext
from pairldp.experiment import (CHUNK, DecayReport, EventSpec, InfeasibleEventError, decay_rate, exact_decay,
                                gaussian_tail_reference, predicted_rate, wilson_stderr)
from pairldp.kernel import gaussian_kernel, loggas_kernel
from pairldp.sampler import McmcConfig

EV = EventSpec.parse("marginal_mean>=0.5")


def test_event_parse():
    assert EV == EventSpec("marginal_mean", 0.5, ">=")
    assert str(EV) == "marginal_mean>=0.5"
    e = EventSpec.parse(" average_mean <= -inf ")
    assert e.threshold == -math.inf and e.direction == "<="
    for bad in ("marginal_mean>0.5", "nope>=1", "marginal_mean>=x"):
        with pytest.raises(ValueError):
            EventSpec.parse(bad)


def test_event_statistics():
    X = np.array([[1.0, 3.0]])
    Y = np.array([[0.0, 0.0]])
    assert EventSpec("marginal_mean", 0).statistic_values(X, Y)[0] == 2.0
    assert EventSpec("average_mean", 0).statistic_values(X, Y)[0] == 1.0
    assert EventSpec("marginal_second_moment", 0).statistic_values(X, Y)[0] == 5.0


# ---- predictions ----

def _pred(theta, text):
    return predicted_rate(RateContext.from_kernel(gaussian_kernel(theta)), EventSpec.parse(text))


def test_predicted_rate_examples():
    assert _pred(0.5, "marginal_mean>=0.5") == pytest.approx(0.1875, abs=1e-15)
    assert _pred(0.0, "marginal_mean>=1") == 1.0
    for a in (0.3, 1.0, 2.0):
        assert _pred(0.5, f"average_mean>={a}") == pytest.approx(a * a, abs=1e-15)


def test_predicted_rate_trivial_sides():
    assert _pred(0.5, "marginal_mean>=-1") == 0.0
    assert _pred(0.5, "marginal_mean<=0.2") == 0.0
    assert _pred(0.5, "marginal_mean<=-0.5") == pytest.approx(0.1875)
    assert _pred(0.5, "marginal_mean>=-inf") == 0.0
    assert _pred(0.5, "marginal_second_moment>=2") == pytest.approx(1.5)
    assert _pred(0.5, "marginal_second_moment<=-1") == math.inf


def test_predicted_rate_search_fallback():
    # loggas with beta = 0 is x^2 + y^2: marginal rate m2(nu) >= m1^2 >= 0.25
    ctx = RateContext.from_kernel(loggas_kernel(0.0))
    p = predicted_rate(ctx, EventSpec.parse("marginal_mean>=0.5"), atoms=9, levels=4)
    assert 0.25 - 1e-9 <= p < 0.6


# ---- exact reference ----

def test_tail_reference_examples():
    lp = gaussian_tail_reference(0.5, 128, EV)
    assert -lp / 128 ** 2 == pytest.approx(0.1879, abs=1e-4)
    assert math.exp(gaussian_tail_reference(0.0, 16, EventSpec.parse("marginal_mean>=0"))) == 0.5
    assert math.exp(gaussian_tail_reference(0.5, 4, EV)) == pytest.approx(7.1e-3, abs=1e-4)


def test_tail_reference_asymptotics():
    # -log P ~ z^2/2 + log(z sqrt(2 pi)) for the normal tail
    n = 128
    sigma = 1 / (n * math.sqrt(1.5))
    z = 0.5 / sigma
    approx = z * z / 2 + math.log(z * math.sqrt(2 * math.pi))
    assert -gaussian_tail_reference(0.5, n, EV) == pytest.approx(approx, rel=1e-4)


def test_tail_reference_errors():
    with pytest.raises(ValueError):
        gaussian_tail_reference(0.5, 4, EventSpec.parse("average_mean>=0.5"))
    with pytest.raises(ValueError):
        gaussian_tail_reference(1.0, 4, EV)


def test_exact_decay_converges():
    rep = exact_decay(0.5, EV, [8, 32, 128])
    vals = [r.reference_neg_log_p_over_n2 for r in rep.rows]
    assert vals[0] > vals[1] > vals[2] > 0.1875
    assert rep.method == "exact_gaussian_tail"


# ---- Monte-Carlo decay ----

def test_wilson_stderr():
    assert wilson_stderr(0, 100) == pytest.approx(1 / 2 / 100 / (1 + 1 / 100))
    assert wilson_stderr(50, 100) == pytest.approx(math.sqrt(0.25 / 100 + 1 / 40000) / 1.01)


def test_decay_n4_matches_reference():
    rep = decay_rate(gaussian_kernel(0.5), EV, [4], 100_000, rng_seed=3)
    r = rep.rows[0]
    assert abs(r.p_hat - r.reference) <= 3 * r.stderr
    assert r.reference == pytest.approx(7.15e-3, abs=1e-5)


def test_decay_example_rows():
    rep = decay_rate(gaussian_kernel(0.5), EV, [2, 4, 8], 100_000, rng_seed=7)
    refs = [r.reference_neg_log_p_over_n2 for r in rep.rows]
    assert refs[0] > refs[1] > refs[2] > rep.predicted_rate == 0.1875
    for r in rep.rows:
        assert abs(r.p_hat - r.reference) <= 3 * r.stderr


def test_decay_sure_event_any_kernel():
    ev = EventSpec.parse("marginal_mean>=-inf")
    rep = decay_rate(gaussian_kernel(0.3), ev, [3], 1000, rng_seed=1)
    assert rep.rows[0].p_hat == 1.0 and rep.rows[0].neg_log_p_over_n2 == 0.0
    rep = decay_rate(loggas_kernel(2.0), ev, [2], 20, rng_seed=1, mcmc=McmcConfig(300, 100))
    assert rep.rows[0].p_hat == 1.0 and rep.rows[0].neg_log_p_over_n2 == 0.0
    assert rep.predicted_rate == 0.0


def test_decay_worker_invariance():
    kern = gaussian_kernel(0.5)
    a = decay_rate(kern, EV, [2, 3], CHUNK + 500, rng_seed=2, workers=1)
    b = decay_rate(kern, EV, [2, 3], CHUNK + 500, rng_seed=2, workers=4)
    assert a.to_csv() == b.to_csv()


def test_decay_infeasible():
    with pytest.raises(InfeasibleEventError, match="largest feasible n"):
        decay_rate(gaussian_kernel(0.5), EV, [64], 1000)


def test_report_serialisation():
    rep = decay_rate(gaussian_kernel(0.5), EV, [2], 2000, rng_seed=0)
    lines = rep.to_csv().splitlines()
    assert lines[0].split(",") == list(DecayReport.COLUMNS)
    assert len(lines) == 2
    d = json.loads(rep.to_json())
    assert d["rows"][0]["n"] == 2 and d["predicted_rate"] == 0.1875
