"""Projection estimator of a Levy density and its maximal deviation.

Given increments X_1..X_n observed with step delta, the coefficient of a
basis function phi_r is estimated by ``sum_k phi_r(X_k) / (n delta)`` and
the estimate is the resulting expansion on the window.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad_vec
from scipy.optimize import minimize_scalar

from .basis import BasisSystem, design, local_values
from .errors import DomainError
from .levy import IncrementSample, LevyModel, levy_density, transition_density

QUAD_EPSABS = 1e-10
POLISH_TOP = 8


@dataclass(frozen=True, eq=False)
class Expansion:
    """A function sum_r coeffs[r] phi_r(x) on a basis system.

    ``coeffs`` is flat of length (J+1) m, laid out cell by cell.
    """

    system: BasisSystem
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float).ravel()
        if c.size != self.system.dim:
            raise DomainError(f"expected {self.system.dim} coefficients, got {c.size}")
        object.__setattr__(self, "coeffs", c)

    @property
    def by_cell(self) -> np.ndarray:
        """Coefficients reshaped to (m, J+1)."""
        return self.coeffs.reshape(self.system.m, self.system.family.size)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        w = self.system.window
        if np.any((x < w.a) | (x > w.b)) or np.any(np.isnan(x)):
            raise DomainError("evaluation point outside the window")
        cells, vals = design(self.system, x.ravel())
        out = np.einsum("ij,ij->i", vals, self.by_cell[cells])
        return out.reshape(x.shape)[()] if x.ndim == 0 else out.reshape(x.shape)

    def cell_values(self, s) -> np.ndarray:
        """Values on every cell at relative positions s in [0, 1], shape (m, len(s)).

        At s = 1 this gives the left-hand limit at the right edge of each cell.
        """
        return self.by_cell @ local_values(self.system, np.asarray(s, dtype=float))


@dataclass(frozen=True, eq=False)
class ProjectionEstimate(Expansion):
    n: int = 0
    delta: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.n < 1 or not self.delta > 0:
            raise DomainError("estimate needs n >= 1 and delta > 0")

    @property
    def T(self) -> float:
        return self.n * self.delta

    def to_dict(self) -> dict:
        return {"system": self.system.to_dict(), "coeffs": [float(c) for c in self.coeffs],
                "n": self.n, "delta": self.delta}

    @classmethod
    def from_dict(cls, d: dict) -> "ProjectionEstimate":
        return cls(BasisSystem.from_dict(d["system"]), d["coeffs"], int(d["n"]), float(d["delta"]))


def estimate_coefficients(sample: IncrementSample, system: BasisSystem) -> np.ndarray:
    """Empirical coefficients sum_k phi_r(X_k) / (n delta).

    Sums are exactly rounded (``math.fsum``) so the result does not depend
    on the order of the increments.
    """
    if sample.n < 1:
        raise DomainError("empty sample")
    cells, vals = design(system, sample.values)
    size = system.family.size
    coeffs = np.zeros(system.dim)
    hit = cells >= 0
    order = np.argsort(cells[hit], kind="stable")
    hc, hv = cells[hit][order], vals[hit][order]
    starts = np.flatnonzero(np.r_[True, hc[1:] != hc[:-1]]) if hc.size else []
    bounds = list(starts) + [hc.size]
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        p = hc[lo]
        for j in range(size):
            coeffs[p * size + j] = math.fsum(hv[lo:hi, j])
    return coeffs / (sample.n * sample.delta)


def projection_estimate(sample: IncrementSample, system: BasisSystem) -> ProjectionEstimate:
    return ProjectionEstimate(system, estimate_coefficients(sample, system), sample.n, sample.delta)


def evaluate_estimate(est: Expansion, x):
    return est(x)


def _project(system: BasisSystem, f: Callable, epsabs: float) -> np.ndarray:
    """Coefficients of the L2 projection of f, cell by cell with quad_vec."""
    size = system.family.size
    pieces = (0.0, 0.5, 1.0) if system.family.tag == "haar" else (0.0, 1.0)
    coeffs = np.zeros(system.dim)
    for p in range(system.m):
        left = float(system.cell_left(p))

        def integrand(s):
            x = left + s * system.delta
            return local_values(system, np.array([s]))[:, 0] * f(x)

        total = np.zeros(size)
        for lo, hi in zip(pieces[:-1], pieces[1:]):
            val, _ = quad_vec(integrand, lo, hi, epsabs=epsabs / system.delta, epsrel=1e-12)
            total += val
        coeffs[p * size:(p + 1) * size] = total * system.delta
    return coeffs


def projection_truth(model: LevyModel | Callable, system: BasisSystem) -> Expansion:
    """Orthogonal projection of the Levy density (or of any callable s) onto the system."""
    f = model if callable(model) else (lambda x: float(levy_density(model, x)))
    return Expansion(system, _project(system, f, QUAD_EPSABS))


def expected_estimate(model: LevyModel, system: BasisSystem, delta: float) -> Expansion:
    """Mean of the estimator: coefficients E phi_r(X_delta) / delta.

    The compound Poisson atom at 0 never meets the window, so only the
    absolutely continuous part of the transition law contributes.
    """
    if not delta > 0:
        raise DomainError("delta must be positive")
    f = lambda x: float(transition_density(model, delta, x)) / delta
    return Expansion(system, _project(system, f, QUAD_EPSABS))


# ------------------------------------------------------------ deviation

@dataclass(frozen=True)
class DeviationReport:
    statistic: float
    argmax_x: float
    grid: int
    mode: str

    def row(self, seed=None) -> dict:
        return {"mode": self.mode, "statistic": self.statistic, "argmax": self.argmax_x, "seed": seed}


def _ratio(est: Expansion, ref_coeffs, reference, s, svec):
    """Weighted deviation at relative positions svec on every cell, shape (m, len(svec))."""
    system = est.system
    x = system.cell_left(np.arange(system.m))[:, None] + svec[None, :] * system.delta
    x = np.minimum(x, system.window.b)
    if ref_coeffs is not None:
        diff = Expansion(system, est.coeffs - ref_coeffs).cell_values(svec)
    else:
        diff = est.cell_values(svec) - np.asarray(reference(x.ravel()), dtype=float).reshape(x.shape)
    sv = np.asarray(s(x.ravel()), dtype=float).reshape(x.shape)
    if np.any(~(sv > 0)):
        raise DomainError("the weight s must stay positive on the window")
    return np.abs(diff) / np.sqrt(sv), x


def _cell_ratio(est, ref_coeffs, reference, s, p, t):
    """Weighted deviation at one relative position t of cell p."""
    system = est.system
    x = min(float(system.cell_left(p) + t * system.delta), system.window.b)
    phi = local_values(system, np.array([t]))[:, 0]
    if ref_coeffs is not None:
        size = system.family.size
        diff = (est.coeffs[p * size:(p + 1) * size] - ref_coeffs[p * size:(p + 1) * size]) @ phi
    else:
        diff = est.by_cell[p] @ phi - float(np.asarray(reference(np.array([x])), dtype=float)[0])
    sv = float(np.asarray(s(np.array([x])), dtype=float)[0])
    return abs(diff) / np.sqrt(sv)


def _polish(est, ref_coeffs, reference, s, svec, ratio, top=POLISH_TOP):
    """Refine interior grid maxima with bounded Brent searches.

    Inside a cell the weighted deviation is smooth, so each discrete local
    maximum brackets a continuous one between its grid neighbours.
    """
    system = est.system
    inner = ratio[:, 1:-1]
    peaks = (inner >= ratio[:, :-2]) & (inner >= ratio[:, 2:])
    cand = np.argwhere(peaks)
    if cand.size == 0:
        return -np.inf, None
    vals = inner[peaks]
    best, best_x = -np.inf, None
    for p, i in cand[np.argsort(vals)[::-1][:top]]:
        lo, hi = svec[i], svec[i + 2]
        res = minimize_scalar(lambda t: -_cell_ratio(est, ref_coeffs, reference, s, p, t),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        if -res.fun > best:
            best, best_x = -res.fun, float(system.cell_left(p) + res.x * system.delta)
    return best, best_x


def _stat_on(est: Expansion, ref_coeffs, reference, s, svec):
    ratio, x = _ratio(est, ref_coeffs, reference, s, svec)
    i = int(np.argmax(ratio))
    return float(ratio.flat[i]), float(x.flat[i]), ratio


def deviation_stat(est: Expansion, reference: Callable, s: Callable, grid: int | None = None,
                   mode: str = "truth", rtol: float = 1e-6, max_points: int = 1 << 22) -> DeviationReport:
    """sup over the window of |est(x) - reference(x)| / sqrt(s(x)).

    For Haar systems the supremum is exact: the estimate is constant on
    each half cell, so with s monotone there the extremes sit at the four
    half-cell end points (left-hand limits included).  Other families use
    a per-cell grid that doubles until the value moves by less than
    ``rtol`` relative; the best interior grid maxima are then polished by
    a bounded scalar search, so the result does not hinge on grid luck.

    When ``reference`` is an ``Expansion`` on the same system the
    difference is taken coefficient-wise, which keeps one-sided limits at
    cell edges correct.
    """
    system = est.system
    size = system.family.size
    min_grid = 16 * system.m * size
    if grid is None:
        grid = min_grid
    if grid < min_grid:
        raise DomainError(f"grid must be at least {min_grid}")
    ref_coeffs = None
    if isinstance(reference, Expansion) and reference.system == system:
        ref_coeffs = reference.coeffs
    if system.family.tag == "haar":
        eps = np.finfo(float).eps
        svec = np.array([0.0, 0.5 - eps, 0.5, 1.0])
        stat, arg, _ = _stat_on(est, ref_coeffs, reference, s, svec)
        return DeviationReport(stat, arg, 4 * system.m, mode)
    k = max(int(grid) // system.m, 16 * size)
    svec = np.linspace(0.0, 1.0, k)
    stat, arg, ratio = _stat_on(est, ref_coeffs, reference, s, svec)
    while True:
        k2 = 2 * k - 1
        if k2 * system.m > max_points:
            warnings.warn("deviation grid hit its size cap before converging", RuntimeWarning)
            break
        svec2 = np.linspace(0.0, 1.0, k2)
        stat2, arg2, ratio2 = _stat_on(est, ref_coeffs, reference, s, svec2)
        done = abs(stat2 - stat) <= rtol * max(abs(stat2), 1e-300)
        stat, arg, k, svec, ratio = stat2, arg2, k2, svec2, ratio2
        if done:
            break
    pol, pol_x = _polish(est, ref_coeffs, reference, s, svec, ratio)
    if pol > stat:
        stat, arg = pol, pol_x
    return DeviationReport(stat, arg, k * system.m, mode)


def deviation_from_truth(est: Expansion, model: LevyModel, grid: int | None = None) -> DeviationReport:
    """The statistic sup |s_hat - s| / sqrt(s)."""
    s = lambda x: levy_density(model, x)
    return deviation_stat(est, s, s, grid, mode="truth")


def deviation_from_expectation(est: ProjectionEstimate, model: LevyModel,
                               grid: int | None = None) -> DeviationReport:
    """The statistic sup |s_hat - E s_hat| / sqrt(s)."""
    s = lambda x: levy_density(model, x)
    ref = expected_estimate(model, est.system, est.delta)
    return deviation_stat(est, ref, s, grid, mode="expectation")


def sup_abs_difference(f: Expansion, g: Callable, grid: int | None = None) -> float:
    """Unweighted sup over the window of |f - g|."""
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))
    return deviation_stat(f, g, one, grid, mode="unweighted").statistic
