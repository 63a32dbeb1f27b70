"""Limit laws for the maximum of m cell suprema.

With ``u_m(y) = y / a_m + b_m - c_m / b_m`` the maximum of m independent
absolute cell suprema, scaled by 1/sqrt(m), satisfies

    P(max / sqrt(m) <= u_m(y)) -> exp(-2 exp(-y)).

The module also holds the accompanying laws A_m for the trigonometric
family, the bias shift used by confidence bands, and Levy / Kolmogorov
distances between distribution functions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _rng
from .basis import BasisFamily, Window, boundedness_constants
from .errors import DomainError, HypothesisError, ParameterError
from .gausssup import (SupSampleConfig, _exact_sup, _sup_block, effective_order,
                       normal_sf, tail_constants)

KAPPA_REGIME = (4.0 / 7.0, 2.0 / 3.0)


@dataclass(frozen=True)
class LimitLawParams:
    family: BasisFamily
    window: Window
    m: int
    k: int
    h1: float
    h2: float
    a_m: float
    b_m: float
    c_m: float

    def u(self, y):
        return threshold_u(self, y)

    def y(self, u):
        """Inverse of the threshold map."""
        return self.a_m * (np.asarray(u, dtype=float) - self.b_m + self.c_m / self.b_m)


def scale_constants(family: BasisFamily, window: Window) -> tuple[float, float, int]:
    """(h1, h2, k) for tails written on the sqrt(m) scale."""
    ta = tail_constants(family)
    L = window.length
    return ta.g1 * L ** (-ta.k / 2.0), ta.g2 * L, ta.k


def normalization(family: BasisFamily, window: Window, m: int) -> LimitLawParams:
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    h1, h2, k = scale_constants(family, window)
    if not h1 * m > np.e:
        raise ParameterError(f"normalization needs h1 * m > e, got {h1 * m:.6g}")
    b = np.sqrt(np.log(h1 * m) / h2)
    return LimitLawParams(family, window, int(m), k, h1, h2, 2.0 * h2 * b, b,
                          k / (2.0 * h2) * np.log(b))


def threshold_u(params: LimitLawParams, y):
    return np.asarray(y, dtype=float) / params.a_m + (params.b_m - params.c_m / params.b_m)


def gumbel_cdf(y):
    return np.exp(-2.0 * np.exp(-np.asarray(y, dtype=float)))


def remainder_R(family: BasisFamily, window: Window, m: int, y=None) -> float | None:
    """Leading-order relative remainder of the Gumbel approximation.

    Returns None for Legendre, whose second-order tail term is not known.
    """
    if m < 16:
        raise DomainError("remainder needs m >= 16")
    if family.tag == "legendre":
        return None
    h1, h2, k = scale_constants(family, window)
    lm = np.log(m)
    if family.tag == "trig":
        n = effective_order(family)
        return float(np.sqrt(n * h2 / (2.0 * np.pi * window.length * h1**2)) / np.sqrt(lm))
    return float(-(k / (4.0 * np.sqrt(h2))) * np.log(lm) / np.sqrt(lm))


# ------------------------------------------------------------ accompanying laws

def _trig_params(J: int, window: Window, m: int) -> LimitLawParams:
    fam = BasisFamily("trig", J)
    if effective_order(fam) < window.length:
        raise HypothesisError("accompanying laws need J + 1 >= b - a")
    return normalization(fam, window, m)


def accompanying_cdf(J: int, window: Window, m: int, y, boundary_term: bool = True):
    """Accompanying law A_m(y) for the trigonometric family of order J.

    Zero below -b_m^(3/2).  ``boundary_term`` switches the end-point
    normal-tail correction 2 m (1 - Phi(u_m sqrt((b-a)/(J+1)))).
    """
    p = _trig_params(J, window, m)
    n = effective_order(p.family)
    y = np.asarray(y, dtype=float)
    expo = -2.0 * np.exp(-y - y * y / (4.0 * np.log(p.h1 * m)))
    if boundary_term:
        expo = expo - 2.0 * m * normal_sf(threshold_u(p, y) * np.sqrt(window.length / n))
    out = np.where(y < -p.b_m**1.5, 0.0, np.exp(expo))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class BiasConstants:
    q: float
    C1: float
    C2: float
    kappa: float
    J: int
    window: Window

    def __post_init__(self):
        if not (self.q > 0 and self.C1 > 0 and self.C2 > 0):
            raise DomainError("q, C1 and C2 must be positive")
        if not 0 < self.kappa < 1:
            raise DomainError("kappa must lie in (0, 1)")

    @property
    def brevec(self) -> float:
        return breve_c(self.q, self.J, self.C1, self.C2, self.window)


def bias_constants(family: BasisFamily, window: Window, q: float, kappa: float) -> BiasConstants:
    C1, C2 = boundedness_constants(family)
    return BiasConstants(q, C1, C2, kappa, family.J, window)


def breve_c(q: float, J: int, C1: float, C2: float, window: Window) -> float:
    if not (q > 0 and J > 0 and C1 > 0 and C2 > 0):
        raise DomainError("all arguments must be positive")
    return q * J * C1 * (C1 + C2) / window.length


def bias_shift(n: float, m: int, kappa: float, bias: BiasConstants | float) -> float:
    """Threshold shift c n^(3 kappa / 2 - 1) sqrt(m) absorbing the estimator bias."""
    if m < 1:
        raise DomainError("m must be positive")
    c = bias.brevec if isinstance(bias, BiasConstants) else float(bias)
    return float(c * n ** (1.5 * kappa - 1.0) * np.sqrt(m))


def accompanying_shifted(J: int, window: Window, m: int, y, n: float, kappa: float,
                         bias: BiasConstants | float, sign: int, boundary_term: bool = True):
    """A_m evaluated at y + sign * 2 h2 c n^(3 kappa/2 - 1) sqrt(m) b_m."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    p = _trig_params(J, window, m)
    shift = 2.0 * p.h2 * bias_shift(n, m, kappa, bias) * p.b_m
    return accompanying_cdf(J, window, m, np.asarray(y, dtype=float) + sign * shift, boundary_term)


def optimal_m(n: float, kappa: float) -> int:
    """round(n^(2 - 3 kappa)), at least 2."""
    lo, hi = KAPPA_REGIME
    if not lo < kappa < hi:
        warnings.warn(f"kappa={kappa} lies outside ({lo:.4f}, {hi:.4f})", RuntimeWarning)
    return max(2, int(round(n ** (2.0 - 3.0 * kappa))))


def lambda_n(n: float, m: int, kappa: float) -> float:
    """Design constant m sqrt(log n) / n^(kappa/2); should be small."""
    return float(m * np.sqrt(np.log(n)) / n ** (kappa / 2.0))


# ------------------------------------------------------------ distances

def ecdf(samples) -> Callable:
    """Right-continuous empirical distribution function."""
    xs = np.sort(np.asarray(samples, dtype=float).ravel())
    N = xs.size

    def F(x):
        return np.searchsorted(xs, np.asarray(x, dtype=float), side="right") / N

    F.support = xs
    return F


def step_cdf(x, values) -> Callable:
    """Right-continuous step function through (x_i, values_i), monotone-repaired."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(values, dtype=float)
    if np.any(np.diff(x) <= 0):
        raise DomainError("grid must be strictly increasing")
    drop = np.max(np.maximum.accumulate(v) - v) if v.size else 0.0
    if drop > 1e-12:
        raise DomainError("CDF values decrease by more than 1e-12")
    v = np.clip(np.maximum.accumulate(v), 0.0, 1.0)

    def F(t):
        i = np.searchsorted(x, np.asarray(t, dtype=float), side="right") - 1
        return np.where(i >= 0, v[np.maximum(i, 0)], 0.0)

    F.support = x
    return F


def _refinement(F, G, x):
    if x is None:
        parts = [getattr(H, "support", None) for H in (F, G)]
        parts = [p for p in parts if p is not None]
        if not parts:
            raise DomainError("a refinement grid is required for continuous CDFs")
        x = np.concatenate(parts)
    x = np.unique(np.asarray(x, dtype=float))
    # left limits matter at jumps
    return np.unique(np.concatenate([x, np.nextafter(x, -np.inf)]))


def kolmogorov_distance(F: Callable, G: Callable, x=None) -> float:
    """sup |F - G| over a refinement containing the jump points (and left limits)."""
    x = _refinement(F, G, x)
    return float(np.max(np.abs(np.asarray(F(x)) - np.asarray(G(x)))))


def levy_distance(F: Callable, G: Callable, x=None, tol: float = 1e-6) -> float:
    """Smallest eps with G(x - eps) - eps <= F(x) <= G(x + eps) + eps on the refinement.

    Found by bisection on [0, 1] to ``tol``.
    """
    x = _refinement(F, G, x)
    fx = np.asarray(F(x), dtype=float)

    def ok(eps):
        return bool(np.all(np.asarray(G(x - eps)) - eps <= fx + 1e-15)
                    and np.all(fx <= np.asarray(G(x + eps)) + eps + 1e-15))

    if ok(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ------------------------------------------------------------ Gumbel experiment

CELL_BATCH = 1 << 21


def _maxima_block(args):
    family, delta, m, grid, seed, block, reps = args
    rng = _rng.block_generator(seed, _rng.TAG_CELL_MAX, m, block)
    out = np.empty(reps)
    step = max(1, CELL_BATCH // m)
    for lo in range(0, reps, step):
        k = min(step, reps - lo)
        if grid is None:
            z = rng.standard_normal((k * m, family.size))
            _, absolute = _exact_sup(family, delta, z)
        else:
            sub = int(rng.integers(0, 2**63))
            _, absolute = _sup_block((family, delta, grid, False, sub, 0, k * m))
        out[lo:lo + k] = absolute.reshape(k, m).max(axis=1)
    return out


def sample_cell_maxima(family: BasisFamily, window: Window, m: int, reps: int, seed: int,
                       grid: int | None = None, workers: int = 1) -> np.ndarray:
    """Draws of max_p zeta_p / sqrt(m) over m independent cells of width (b-a)/m.

    ``grid=None`` uses the closed-form cell supremum (Haar, single-frequency
    trig); otherwise cells are maximized on a grid.
    """
    delta = window.length / m
    cfg = SupSampleConfig(family, delta, 1, seed, "absolute", grid)
    if grid is None and not cfg.exact_path():
        raise DomainError("this family needs a grid")
    block = max(1, (1 << 24) // m)
    jobs = [(family, delta, int(m), grid, seed, b, size)
            for b, size in enumerate(_rng.block_sizes(int(reps), block))]
    return np.concatenate(_rng.parallel_map(_maxima_block, jobs, workers)) / np.sqrt(m)


@dataclass
class LawComparison:
    m: int
    params: LimitLawParams
    y: np.ndarray  # standardized draws a_m (W - b_m + c_m / b_m)
    ks_gumbel: float
    ks_accompanying: float | None
    levy_gumbel: float
    levy_accompanying: float | None


def compare_laws(maxima: np.ndarray, family: BasisFamily, window: Window, m: int,
                 boundary_term: bool = True, accompanying: bool = True) -> LawComparison:
    """KS and Levy distances of the standardized maxima to Gumbel and A_m."""
    params = normalization(family, window, m)
    y = np.sort(params.y(maxima))
    F = ecdf(y)
    ks_g = kolmogorov_distance(F, gumbel_cdf, y)
    lv_g = levy_distance(F, gumbel_cdf, y)
    ks_a = lv_a = None
    if accompanying and family.tag == "trig":
        A = lambda t: accompanying_cdf(family.J, window, m, t, boundary_term)
        ks_a = kolmogorov_distance(F, A, y)
        lv_a = levy_distance(F, A, y)
    return LawComparison(m, params, y, ks_g, ks_a, lv_g, lv_a)


def law_table(comp: LawComparison, y_grid, n: float | None = None, kappa: float | None = None,
              bias: BiasConstants | float | None = None, accompanying: bool = True) -> dict:
    """Columns y, empirical, gumbel, A_m, A_m_minus, A_m_plus on a y grid."""
    y_grid = np.asarray(y_grid, dtype=float)
    F = ecdf(comp.y)
    cols = {"y": y_grid, "empirical": F(y_grid), "gumbel": gumbel_cdf(y_grid)}
    fam = comp.params.family
    if accompanying and fam.tag == "trig":
        J, w, m = fam.J, comp.params.window, comp.m
        cols["A_m"] = accompanying_cdf(J, w, m, y_grid)
        if n is not None and bias is not None:
            cols["A_m_minus"] = accompanying_shifted(J, w, m, y_grid, n, kappa, bias, -1)
            cols["A_m_plus"] = accompanying_shifted(J, w, m, y_grid, n, kappa, bias, +1)
        else:
            cols["A_m_minus"] = cols["A_m_plus"] = cols["A_m"]
    return cols
