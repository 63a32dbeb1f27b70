import numpy as np
import pytest
from scipy import integrate, special, stats

from levymaxdev.basis import Window
from levymaxdev.errors import DomainError
from levymaxdev.levy import (CompoundPoissonExp, GammaProcess, fitted_q, levy_density, levy_tail,
                             read_increments, sample_increments, small_time_check, transition_atom,
                             transition_cdf, transition_density, transition_sf, write_increments)

GAMMA = GammaProcess(1.0, 1.0)
CP = CompoundPoissonExp(1.0, 1.0)
D = Window(0.5, 1.5)
KS99 = 1.628  # asymptotic 99% quantile of sqrt(N) * KS


def test_density_values():
    assert levy_density(GAMMA, 1.0) == pytest.approx(np.exp(-1), abs=1e-15)
    assert levy_density(CompoundPoissonExp(2, 1), np.log(2)) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DomainError):
        levy_density(CompoundPoissonExp(2, 1), 0.0)
    with pytest.raises(DomainError):
        levy_tail(GAMMA, -1.0)


def test_tail_values():
    cp2 = CompoundPoissonExp(2, 1)
    assert levy_tail(cp2, 1e-14) == pytest.approx(2.0)
    assert levy_tail(cp2, 1.0) == pytest.approx(2 * np.exp(-1), abs=1e-15)
    oracle, _ = integrate.quad(lambda t: np.exp(-t) / t, 1.0, np.inf, epsabs=1e-14)
    assert levy_tail(GAMMA, 1.0) == pytest.approx(oracle, rel=1e-12)
    assert levy_tail(GAMMA, 1.0) == pytest.approx(0.2193839, abs=1e-7)


@pytest.mark.parametrize("model", [GAMMA, CP, GammaProcess(2.0, 3.0), CompoundPoissonExp(3.0, 0.5)])
def test_tail_is_antiderivative(model):
    for x in (0.3, 1.0, 2.5):
        M = 40.0
        body, _ = integrate.quad(lambda t: levy_density(model, t), x, M, epsabs=1e-13, limit=200)
        assert abs(levy_tail(model, x) - body - levy_tail(model, M)) < 1e-9


def test_model_validation():
    with pytest.raises(DomainError):
        GammaProcess(0.0, 1.0)
    with pytest.raises(DomainError):
        CompoundPoissonExp(1.0, -1.0)


def test_transition_density_values():
    assert transition_density(GAMMA, 1.0, 1.0) == pytest.approx(np.exp(-1), abs=1e-15)
    assert transition_density(CP, 1.0, -0.5) == 0.0
    # closed form of the compound Poisson exponential law
    x = np.array([0.1, 1.0, 3.0])
    lam_t = 1.0
    oracle = np.exp(-lam_t - x) * np.sqrt(lam_t / x) * special.iv(1, 2 * np.sqrt(lam_t * x))
    assert np.allclose(transition_density(CP, 1.0, x), oracle, rtol=1e-12, atol=0)
    assert transition_density(CP, 1.0, 1.0) == pytest.approx(0.2152692892, rel=1e-9)


def test_transition_density_matches_monte_carlo():
    draws = sample_increments(CP, 10**6, 1.0, 11).values
    h = 0.05
    est = np.mean(np.abs(draws - 1.0) < h) / (2 * h)
    exact, _ = integrate.quad(lambda t: transition_density(CP, 1.0, t), 1 - h, 1 + h)
    assert est == pytest.approx(exact / (2 * h), rel=0.02)


@pytest.mark.parametrize("model,tol", [(CP, 1e-9), (GAMMA, 1e-12), (GammaProcess(0.5, 2.0), 1e-12)])
@pytest.mark.parametrize("delta", [1.0, 0.1])
def test_transition_mass(model, tol, delta):
    body = sum(integrate.quad(lambda t: transition_density(model, delta, t), lo, hi,
                              epsabs=1e-14, epsrel=1e-13, limit=400)[0]
               for lo, hi in ((0, 1e-8), (1e-8, 1), (1, np.inf)))
    assert abs(body + transition_atom(model, delta) - 1.0) < tol


@pytest.mark.parametrize("model", [CP, GAMMA])
def test_survival_matches_density_quadrature(model):
    for x in (0.5, 1.0, 1.5):
        q, _ = integrate.quad(lambda t: transition_density(model, 0.01, t), x, np.inf,
                              epsabs=1e-13, epsrel=1e-12)
        assert transition_sf(model, 0.01, x) == pytest.approx(q, rel=1e-9, abs=1e-13)


def test_sample_rejects_empty():
    with pytest.raises(DomainError):
        sample_increments(CP, 0, 1.0, 1)


def test_sample_zero_fraction():
    N, delta = 10**6, 1e-3
    v = sample_increments(CP, N, delta, 5).values
    p = np.exp(-delta)
    assert abs(np.mean(v == 0.0) - p) <= 4 * np.sqrt(p * (1 - p) / N)


def test_sample_gamma_mean():
    N = 10**6
    v = sample_increments(GAMMA, N, 1.0, 6).values
    assert abs(v.mean() - 1.0) <= 4 * 1.0 / np.sqrt(N)


@pytest.mark.parametrize("model,delta", [(CP, 0.5), (GAMMA, 1.0), (GAMMA, 0.05)])
def test_simulation_law_ks(model, delta):
    N = 10**6
    v = np.sort(sample_increments(model, N, delta, 9).values)
    F = transition_cdf(model, delta, v)
    i = np.arange(1, N + 1)
    # for the atom at 0 compare right limits only; left limits are zero there
    lower = np.where(v > 0, F - (i - 1) / N, 0.0)
    ks = max(np.max(i / N - F), np.max(lower))
    assert ks < 4 * KS99 / np.sqrt(N)


def test_sampling_reproducible_and_worker_free():
    a = sample_increments(GAMMA, 200_000, 0.01, 42).values
    b = sample_increments(GAMMA, 200_000, 0.01, 42, workers=2).values
    c = sample_increments(GAMMA, 200_000, 0.01, 43).values
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    # a prefix is unaffected by the total length (block streams)
    assert np.array_equal(sample_increments(GAMMA, 1000, 0.01, 42).values, a[:1000])


def test_small_time_decay_and_grid_monotone():
    assert small_time_check(GAMMA, D, 1e-4) < small_time_check(GAMMA, D, 1e-3)
    ratios = [small_time_check(CP, D, d) / d for d in (1e-2, 1e-3, 1e-4)]
    assert max(ratios) / min(ratios) < 3
    assert fitted_q(CP, D) == pytest.approx(max(ratios))
    for model in (CP, GAMMA):
        # grids nested so the finer sup can only grow
        assert small_time_check(model, D, 1e-3, 1000 * 9 + 1) >= small_time_check(model, D, 1e-3, 10)
    with pytest.raises(DomainError):
        small_time_check(GAMMA, Window(-1.0, 1.0), 1e-3)


def test_small_time_ratio_bounded():
    for model in (CP, GAMMA):
        ratios = [small_time_check(model, D, d) / d for d in (1e-2, 1e-3, 1e-4)]
        assert np.all(np.isfinite(ratios)) and max(ratios) < 1.0


def test_increment_roundtrip(tmp_path):
    s = sample_increments(GAMMA, 500, 0.1, 3)
    write_increments(s, tmp_path / "inc.csv", "abc")
    back = read_increments(tmp_path / "inc.csv")
    assert np.array_equal(back.values, s.values)
    assert back.delta == s.delta and back.model == GAMMA and back.seed == 3


def test_increment_schema_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("value\n1.0\n")
    (tmp_path / "bad.json").write_text('{"delta": 0.1}')
    with pytest.raises(ValueError):
        read_increments(p)
    p.write_text("increment\n1.0\n")
    (tmp_path / "bad.json").write_text('{"n": 1}')
    with pytest.raises(ValueError):
        read_increments(p)


def test_gamma_law_matches_scipy():
    x = np.linspace(0.01, 3, 50)
    assert np.allclose(transition_cdf(GAMMA, 0.3, x), stats.gamma.cdf(x, 0.3), rtol=1e-12)
