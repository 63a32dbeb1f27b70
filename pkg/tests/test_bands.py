import numpy as np
import pytest

from levymaxdev.bands import (EPS_FLOOR, accompanying_quantile, check_design, confidence_band,
                              coverage_experiment, gumbel_quantile, replicate_seed, surrogate_noncoverage,
                              threshold_scale)
from levymaxdev.basis import Window, haar, make_system, trig
from levymaxdev.errors import DomainError, ParameterError
from levymaxdev.estimator import ProjectionEstimate, projection_estimate, projection_truth
from levymaxdev.levy import GammaProcess, sample_increments
from levymaxdev.limits import accompanying_cdf, bias_constants, gumbel_cdf, normalization

GAMMA = GammaProcess(1.0, 1.0)
W01 = Window(0.0, 1.0)


def test_gumbel_quantile():
    assert gumbel_quantile(np.exp(-2)) == pytest.approx(0.0, abs=1e-15)
    assert gumbel_quantile(0.9) == pytest.approx(2.9435, abs=5e-5)
    for p in (0.5, 0.9, 0.99):
        assert abs(gumbel_cdf(gumbel_quantile(p)) - p) < 1e-12
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(DomainError):
            gumbel_quantile(bad)


def test_accompanying_quantile_roundtrip():
    for p in (0.5, 0.9, 0.99):
        y = accompanying_quantile(2, W01, 100, p)
        assert accompanying_cdf(2, W01, 100, y) == pytest.approx(p, abs=1e-10)


def _constant_estimate(system, value, n, delta):
    c = projection_truth(lambda x: value, system).coeffs
    return ProjectionEstimate(system, c, n, delta)


def test_band_half_width_chain():
    s = make_system("trig", 2, 0, 1, 100)
    est = _constant_estimate(s, 1.0, 100, 1.0)  # T = 100
    band = confidence_band(est, level=0.9)
    p = normalization(trig(2), W01, 100)
    expected = np.sqrt(100 / 100) * (p.b_m + gumbel_quantile(0.9) / p.a_m)
    assert band.half_width_scale == pytest.approx(expected, rel=1e-14)
    assert np.allclose(band.upper - band.estimate, expected, rtol=1e-9)


def test_band_ordering_and_clipping():
    s = make_system("haar", None, 0.5, 1.5, 8)
    est = projection_estimate(sample_increments(GAMMA, 20000, 0.01, 4), s)
    band = confidence_band(est, level=0.9)
    assert np.all(band.lower <= band.estimate) and np.all(band.estimate <= band.upper)
    assert np.all(band.lower >= 0)
    assert band.x[0] == 0.5 and band.x[-1] == 1.5


def test_band_widens_with_level_and_shift():
    s = make_system("legendre", 2, 0.5, 1.5, 4)
    n, kappa = 10**4, 0.6
    T = n**kappa
    est = projection_estimate(sample_increments(GAMMA, n, T / n, 2), s)
    widths = [confidence_band(est, level=p).half_width_scale for p in (0.5, 0.8, 0.9, 0.99, 0.9999)]
    assert np.all(np.diff(widths) > 0)
    bias = bias_constants(s.family, s.window, 0.6, kappa)
    assert confidence_band(est, bias=bias).half_width_scale > confidence_band(est).half_width_scale


def test_band_floor_applies():
    s = make_system("haar", None, 0.5, 1.5, 4)
    est = _constant_estimate(s, 0.0, 100, 1.0)
    band = confidence_band(est)
    assert np.allclose(band.upper, np.sqrt(EPS_FLOOR) * band.half_width_scale)


def test_band_horizon_check():
    s = make_system("haar", None, 0.5, 1.5, 4)
    est = projection_estimate(sample_increments(GAMMA, 1000, 0.1, 1), s)  # T = 100, not n^0.6
    with pytest.raises(DomainError):
        confidence_band(est, bias=bias_constants(haar(), s.window, 1.0, 0.6))


def test_band_normalization_guard():
    s = make_system("haar", None, 0.5, 1.5, 2)
    with pytest.raises(ParameterError):
        confidence_band(_constant_estimate(s, 1.0, 10, 1.0))


def test_threshold_scale_accompanying_option():
    s = make_system("trig", 2, 0, 1, 100)
    g = threshold_scale(s, 100, 0.9)
    a = threshold_scale(s, 100, 0.9, quantile="accompanying")
    assert a != g and a > 0
    with pytest.raises(DomainError):
        threshold_scale(make_system("haar", None, 0, 1, 100), 100, 0.9, quantile="accompanying")


def test_replicate_seeds_distinct():
    seeds = {replicate_seed(7, r) for r in range(1000)}
    assert len(seeds) == 1000 and replicate_seed(7, 3) == replicate_seed(7, 3)


def test_design_checks():
    with pytest.warns(RuntimeWarning):
        check_design(10**5, 10, 0.6)
    with pytest.raises(ParameterError):
        check_design(10**4, 40, 0.6)
    with pytest.raises(ParameterError):
        coverage_experiment(GAMMA, haar(), 0.6, 10**4, 0.9, 5, 1, m=40)
    with pytest.raises(DomainError):
        coverage_experiment(GAMMA, haar(), 0.6, 10**4, 0.9, 5, 1, window=Window(-0.5, 1.0))


def test_small_coverage_is_fraction():
    with pytest.warns(RuntimeWarning):
        r = coverage_experiment(GAMMA, haar(), 0.6, 2000, 0.99, 10, 3)
    assert 0.0 <= r.coverage <= 1.0 and r.reps == 10
    assert r.T == pytest.approx(2000**0.6) and r.delta == pytest.approx(r.T / 2000)


@pytest.fixture(scope="module")
def paired_runs():
    out = {}
    with pytest.warns(RuntimeWarning):
        for n in (10**4, 10**5):
            out[n] = coverage_experiment(GAMMA, haar(), 0.6, n, 0.9, 200, 2024)
    return out


def test_coverage_nested_levels(paired_runs):
    for r in paired_runs.values():
        c = [r.coverage_at(p) for p in (0.5, 0.8, 0.9, 0.95, 0.99)]
        assert np.all(np.diff(c) >= 0)
        assert r.coverage_at(0.9) == r.coverage


def test_coverage_increases_with_n(paired_runs):
    assert paired_runs[10**5].coverage >= paired_runs[10**4].coverage


def test_coverage_worker_free():
    with pytest.warns(RuntimeWarning):
        a = coverage_experiment(GAMMA, haar(), 0.6, 10**4, 0.9, 6, 5)
        b = coverage_experiment(GAMMA, haar(), 0.6, 10**4, 0.9, 6, 5, workers=2)
    assert np.array_equal(a.statistics, b.statistics)


def test_surrogate_noncoverage_m1000():
    nc = surrogate_noncoverage(2, W01, 1000, 0.9, 100_000, seed=7)
    assert abs(nc - 0.1) <= 0.04
