"""Uniform confidence bands for a Levy density and coverage experiments.

The band at level p is

    s_hat(x) -+ sqrt(max(s_hat(x), eps)) * sqrt(m / T) * (u_m(y_p) + shift)

where y_p is a quantile of the limit law and ``shift`` absorbs the bias of
the projection estimator.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _rng
from .basis import BasisFamily, BasisSystem, Window
from .errors import DomainError, ParameterError
from .estimator import ProjectionEstimate, deviation_from_truth, projection_estimate
from .levy import LevyModel, fitted_q, sample_increments
from .limits import (BiasConstants, accompanying_cdf, bias_constants, bias_shift, lambda_n,
                     normalization, optimal_m, sample_cell_maxima, threshold_u)

EPS_FLOOR = 1e-6
LAMBDA_WARN = 0.5
LAMBDA_CAP = 2.0


def gumbel_quantile(level: float) -> float:
    """Inverse of y -> exp(-2 exp(-y))."""
    if not 0.0 < level < 1.0:
        raise DomainError("level must lie strictly between 0 and 1")
    return float(-np.log(-np.log(level) / 2.0))


def accompanying_quantile(J: int, window: Window, m: int, level: float,
                          boundary_term: bool = True) -> float:
    """Quantile of the accompanying law A_m by root finding."""
    if not 0.0 < level < 1.0:
        raise DomainError("level must lie strictly between 0 and 1")
    f = lambda y: accompanying_cdf(J, window, m, y, boundary_term) - level
    lo, hi = -5.0, 5.0
    while f(lo) > 0:
        lo *= 2.0
    while f(hi) < 0:
        hi *= 2.0
    return float(brentq(f, lo, hi, xtol=1e-12))


def level_quantile(system: BasisSystem, level: float, quantile: str = "gumbel") -> float:
    if quantile == "gumbel":
        return gumbel_quantile(level)
    if quantile == "accompanying":
        if system.family.tag != "trig":
            raise DomainError("accompanying quantiles exist for the trig family only")
        return accompanying_quantile(system.J, system.window, system.m, level)
    raise DomainError(f"unknown quantile rule {quantile!r}")


def threshold_scale(system: BasisSystem, T: float, level: float, shift: float = 0.0,
                    quantile: str = "gumbel") -> float:
    """sqrt(m / T) (u_m(y_level) + shift): the band half width per unit sqrt(s)."""
    params = normalization(system.family, system.window, system.m)
    y = level_quantile(system, level, quantile)
    return float(np.sqrt(system.m / T) * (threshold_u(params, y) + shift))


@dataclass(frozen=True, eq=False)
class ConfidenceBand:
    x: np.ndarray
    lower: np.ndarray
    estimate: np.ndarray
    upper: np.ndarray
    level: float
    half_width_scale: float

    def rows(self):
        return zip(self.x, self.lower, self.estimate, self.upper)


def confidence_band(est: ProjectionEstimate, eps: float = EPS_FLOOR, bias: BiasConstants | None = None,
                    level: float = 0.9, grid: int | None = None, quantile: str = "gumbel") -> ConfidenceBand:
    """Plug-in uniform band around the estimate on a uniform grid of the window.

    With ``bias`` the threshold is shifted by c n^(3 kappa/2 - 1) sqrt(m),
    which requires T = n^kappa.
    """
    system = est.system
    shift = 0.0
    if bias is not None:
        if abs(est.T - est.n ** bias.kappa) > 1e-9 * est.T:
            raise DomainError("estimate horizon T differs from n^kappa")
        shift = bias_shift(est.n, system.m, bias.kappa, bias)
    scale = threshold_scale(system, est.T, level, shift, quantile)
    if grid is None:
        grid = 16 * system.m * system.family.size + 1
    w = system.window
    x = np.linspace(w.a, w.b, int(grid))
    s_hat = est(x)
    half = np.sqrt(np.maximum(s_hat, eps)) * scale
    return ConfidenceBand(x, np.maximum(s_hat - half, 0.0), s_hat, s_hat + half, level, scale)


# ------------------------------------------------------------ experiments

def replicate_seed(seed: int, rep: int) -> int:
    """64-bit seed of replication ``rep``, derived from the master seed."""
    ss = np.random.SeedSequence(_rng.check_seed(seed), spawn_key=(_rng.TAG_COVERAGE, int(rep)))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class CoverageResult:
    coverage: float
    level: float
    reps: int
    n: int
    kappa: float
    m: int
    T: float
    delta: float
    q: float
    shift: float
    half_width_scale: float
    lambda_n: float
    system: BasisSystem = field(repr=False)
    statistics: np.ndarray = field(repr=False)

    def coverage_at(self, level: float, quantile: str = "gumbel") -> float:
        """Coverage of the nested band at another level, from the same replications."""
        scale = threshold_scale(self.system, self.T, level, self.shift, quantile)
        return float(np.mean(self.statistics <= scale))

    def summary(self) -> dict:
        return {k: getattr(self, k) for k in ("coverage", "level", "reps", "n", "kappa", "m", "T",
                                              "delta", "q", "shift", "half_width_scale", "lambda_n")}


def _coverage_rep(args):
    model, system, n, delta, seed = args
    sample = sample_increments(model, n, delta, seed)
    return deviation_from_truth(projection_estimate(sample, system), model).statistic


def check_design(n: int, m: int, kappa: float, cap: float = LAMBDA_CAP) -> float:
    """Validate the design constant m sqrt(log n) / n^(kappa/2); return it."""
    lam = lambda_n(n, m, kappa)
    if lam > cap:
        raise ParameterError(f"design constant {lam:.3g} exceeds the cap {cap}")
    if lam > LAMBDA_WARN:
        warnings.warn(f"design constant {lam:.3g} > {LAMBDA_WARN}: asymptotics may be poor",
                      RuntimeWarning)
    return lam


def coverage_experiment(model: LevyModel, family: BasisFamily, kappa: float, n: int, level: float,
                        reps: int, seed: int, window: Window = Window(0.5, 1.5), q: float | None = None,
                        m: int | None = None, quantile: str = "gumbel", workers: int = 1,
                        lambda_cap: float = LAMBDA_CAP) -> CoverageResult:
    """Fraction of replications with sup |s_hat - s| / sqrt(s) inside the band scale.

    ``q`` defaults to twice the fitted small-time constant; ``m`` to the
    rate-optimal choice.
    """
    if reps < 1 or n < 2:
        raise DomainError("need reps >= 1 and n >= 2")
    window.require_away_from_zero()
    if m is None:
        m = optimal_m(n, kappa)
    lam = check_design(n, m, kappa, lambda_cap)
    T = float(n) ** kappa
    delta = T / n
    if q is None:
        q = 2.0 * fitted_q(model, window)
    bias = bias_constants(family, window, q, kappa)
    shift = bias_shift(n, m, kappa, bias)
    system = BasisSystem(family, window, m)
    scale = threshold_scale(system, T, level, shift, quantile)
    jobs = [(model, system, int(n), delta, replicate_seed(seed, r)) for r in range(int(reps))]
    stats = np.array(_rng.parallel_map(_coverage_rep, jobs, workers))
    return CoverageResult(float(np.mean(stats <= scale)), level, int(reps), int(n), kappa, m, T,
                          delta, q, shift, scale, lam, system, stats)


def surrogate_noncoverage(J: int, window: Window, m: int, level: float, reps: int, seed: int,
                          workers: int = 1) -> float:
    """Non-coverage of the unshifted Gumbel threshold for Gaussian surrogate maxima."""
    fam = BasisFamily("trig", J)
    params = normalization(fam, window, m)
    w = sample_cell_maxima(fam, window, m, reps, seed, workers=workers)
    return float(np.mean(w > threshold_u(params, gumbel_quantile(level))))
