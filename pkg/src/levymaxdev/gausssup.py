"""Suprema of the Gaussian process Y(x) = sum_j Z_j psi_j(x) over one cell.

``zeta_tilde = sup Y`` (signed) and ``zeta = sup |Y|`` (absolute) drive the
limit theory of the maximal deviation.  This module samples them by Monte
Carlo, evaluates their tail asymptotics for the three basis families and
provides the exactly solvable small cases.

Trigonometric order convention
------------------------------
A trigonometric family of order J (J even) has J + 1 functions per cell.
The tail constants of the stationary trig process depend on the number of
functions, so every trig formula here is evaluated with the effective
order ``J + 1`` (see ``effective_order``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from . import _rng
from .basis import BasisFamily, BasisSystem, Window, local_values
from .errors import DomainError

SIGNED, ABSOLUTE = "signed", "absolute"
MODES = (SIGNED, ABSOLUTE)

SUP_BLOCK = 1 << 15
GUARD = 3.0


class GuardedFloat(float):
    """A float that remembers whether it was computed inside its validity regime."""

    low_confidence: bool = False

    def __new__(cls, value, low_confidence=False):
        obj = super().__new__(cls, value)
        obj.low_confidence = bool(low_confidence)
        return obj


def _mode(mode: str) -> str:
    mode = str(mode).lower()
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}")
    return mode


def effective_order(family: BasisFamily) -> int:
    """Order entering the tail constants: J + 1 for trig, J otherwise."""
    return family.J + 1 if family.tag == "trig" else family.J


# ------------------------------------------------------------ normal tails

def normal_sf(u):
    """Exact 1 - Phi(u), accurate far into the upper tail.

    ``ndtr`` flushes to zero once the value turns subnormal (u > 37.5);
    there the log form still yields the correctly rounded value.
    """
    u = np.asarray(u, dtype=float)
    out = special.ndtr(-u)
    tiny = out < np.finfo(float).tiny
    if np.any(tiny):
        out = np.where(tiny, np.exp(special.log_ndtr(-u)), out)
    return out[()] if out.ndim == 0 else out


def normal_pdf(u):
    u = np.asarray(u, dtype=float)
    return np.exp(-0.5 * u * u) / np.sqrt(2.0 * np.pi)


def normal_tail(u, order: int = 0):
    """Mills-ratio approximation of 1 - Phi(u): order 0 or 2."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise DomainError("the Mills expansion needs u > 0")
    lead = normal_pdf(u) / u
    if order == 0:
        return lead
    if order == 2:
        return lead * (1.0 - 1.0 / u**2)
    raise DomainError("order must be 0 or 2")


# ------------------------------------------------------------ sampling

@dataclass(frozen=True)
class SupSampleConfig:
    family: BasisFamily
    delta: float
    reps: int
    seed: int = 0
    mode: str = ABSOLUTE
    grid: int | None = 1024

    def __post_init__(self):
        if not self.delta > 0:
            raise DomainError("delta must be positive")
        if int(self.reps) != self.reps or self.reps < 1:
            raise DomainError("reps must be a positive integer")
        object.__setattr__(self, "mode", _mode(self.mode))
        _rng.check_seed(self.seed)
        if self.grid is not None and self.family.tag != "haar" and self.grid < 256:
            raise DomainError("smooth families need grid >= 256")

    def exact_path(self) -> bool:
        """Whether draws come from a closed-form supremum instead of a grid."""
        if self.family.tag == "haar":
            return True
        if self.family.tag == "trig" and self.family.J == 2 and self.grid is None:
            return True
        if self.family.tag == "legendre" and self.family.J == 0:
            return True
        return False


def _cell_system(family: BasisFamily, delta: float) -> BasisSystem:
    return BasisSystem(family, Window(1.0, 1.0 + delta), 1)


def _exact_sup(family: BasisFamily, delta: float, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form (signed, absolute) suprema for Haar, J=0 and single-frequency trig."""
    r = 1.0 / np.sqrt(delta)
    if family.tag == "haar":
        z0, z1 = z[:, 0], np.abs(z[:, 1])
        return (z0 + z1) * r, (np.abs(z0) + z1) * r
    if family.J == 0:
        z0 = z[:, 0]
        return z0 * r, np.abs(z0) * r
    # a Z0 + b (Z1 cos + Z2 sin) peaks at amplitude |(Z1, Z2)|
    z0, amp = z[:, 0], np.hypot(z[:, 1], z[:, 2])
    return (z0 + np.sqrt(2.0) * amp) * r, (np.abs(z0) + np.sqrt(2.0) * amp) * r


def _sup_block(args):
    family, delta, grid, exact, seed, block, size = args
    rng = _rng.block_generator(seed, _rng.TAG_SUP, block)
    z = rng.standard_normal((size, family.size))
    if exact:
        return _exact_sup(family, delta, z)
    basis = local_values(_cell_system(family, delta), np.linspace(0.0, 1.0, grid))
    step = max(1, (1 << 22) // grid)
    signed, absolute = np.empty(size), np.empty(size)
    for lo in range(0, size, step):
        y = z[lo:lo + step] @ basis
        hi_, lo_ = y.max(axis=1), y.min(axis=1)
        signed[lo:lo + step] = hi_
        absolute[lo:lo + step] = np.maximum(hi_, -lo_)
    return signed, absolute


def sample_sup_pair(config: SupSampleConfig, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Signed and absolute suprema from the same Gaussian draws.

    The process is evaluated on ``grid`` equally spaced points of the closed
    cell.  Haar, the constant family and the single-frequency trig family
    with ``grid=None`` use exact closed forms.
    """
    exact = config.exact_path()
    if not exact and config.grid is None:
        raise DomainError("grid is required for this family")
    jobs = [(config.family, config.delta, config.grid, exact, config.seed, b, size)
            for b, size in enumerate(_rng.block_sizes(config.reps, SUP_BLOCK))]
    parts = _rng.parallel_map(_sup_block, jobs, workers)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def sample_sup(config: SupSampleConfig, workers: int = 1) -> np.ndarray:
    signed, absolute = sample_sup_pair(config, workers)
    return signed if config.mode == SIGNED else absolute


def unit_variance_delta(family: BasisFamily) -> float:
    """Cell width at which the maximal variance of Y equals one."""
    if family.tag == "legendre":
        return float((family.J + 1) ** 2)
    return float(family.size)


def legendre_variance(J: int, t, c: float | None = None):
    """Variance of c * sum_j Phat_j(t) Z_j on [-1, 1]; c defaults to sqrt(2)/(J+1)."""
    if c is None:
        c = np.sqrt(2.0) / (J + 1)
    fam = BasisFamily("legendre", J)
    t = np.asarray(t, dtype=float)
    s = (t + 1.0) / 2.0
    vals = local_values(_cell_system(fam, 2.0), np.atleast_1d(s))
    var = c**2 * np.sum(vals**2, axis=0)
    return var.reshape(t.shape)[()] if t.ndim == 0 else var


def legendre_sigma_slope(J: int) -> float:
    """Derivative of the normalized standard deviation at t = 1."""
    return J * (J + 2) / 4.0


def empirical_tail(draws: np.ndarray, u) -> tuple[np.ndarray, np.ndarray]:
    """Fraction of draws strictly above each u and its binomial standard error."""
    draws = np.sort(np.asarray(draws))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    p = 1.0 - np.searchsorted(draws, u, side="right") / draws.size
    return p, np.sqrt(p * (1.0 - p) / draws.size)


# ------------------------------------------------------------ asymptotics

@dataclass(frozen=True)
class TailAsymptotic:
    family: BasisFamily
    k: int
    g1: float
    g2: float
    remainder: str  # "trig_explicit" | "wavelet_quadratic" | "unknown"


def trig_c(J: int) -> float:
    """Curvature constant of the trig correlation for a family of order J."""
    n = J + 1
    return float(sum(j * j for j in range(1, (n - 1) // 2 + 1)) / n)


def tail_constants(family: BasisFamily) -> TailAsymptotic:
    if family.tag == "trig":
        n = effective_order(family)
        g1 = np.sqrt(2.0 * trig_c(family.J))
        return TailAsymptotic(family, 0, float(g1), 1.0 / (2.0 * n), "trig_explicit")
    if family.tag == "legendre":
        J = family.J
        return TailAsymptotic(family, 1, float(np.sqrt(2.0) * (J + 1) / np.sqrt(np.pi)),
                              1.0 / (2.0 * (J + 1) ** 2), "unknown")
    return TailAsymptotic(family, 1, float(2.0 / np.sqrt(np.pi)), 0.25, "wavelet_quadratic")


def asymptotic_tail(family: BasisFamily, delta: float, u: float, mode: str = SIGNED) -> GuardedFloat:
    """Leading-order tail g1 / (sqrt(delta) u)^k exp(-g2 delta u^2), doubled for |Y|."""
    ta = tail_constants(family)
    x = np.sqrt(delta) * u
    val = ta.g1 / x**ta.k * np.exp(-ta.g2 * x * x)
    if _mode(mode) == ABSOLUTE:
        val *= 2.0
    return GuardedFloat(val, x < GUARD)


def m_scale_tail(family: BasisFamily, window: Window, m: int, u: float, mode: str = SIGNED) -> GuardedFloat:
    """Same tail written on the scale u ~ sqrt(m): h1 m^(k/2) / u^k exp(-h2 u^2 / m)."""
    ta = tail_constants(family)
    L = window.length
    h1 = ta.g1 * L ** (-ta.k / 2.0)
    h2 = ta.g2 * L
    val = h1 * m ** (ta.k / 2.0) / u**ta.k * np.exp(-h2 * u * u / m)
    if _mode(mode) == ABSOLUTE:
        val *= 2.0
    return GuardedFloat(val, u / np.sqrt(m) < GUARD)


def trig_refined_tail(J: int, delta: float, u: float) -> float:
    """Refined signed tail for the trig process including the end-point term.

    sqrt(2c) exp(-delta u^2 / (2n)) + (1 - Phi(u sqrt(delta / n))) with n = J + 1.
    """
    fam = BasisFamily("trig", J)
    n = effective_order(fam)
    c = trig_c(J)
    return float(np.sqrt(2.0 * c) * np.exp(-delta * u * u / (2.0 * n)) + normal_sf(u * np.sqrt(delta / n)))


def trig_tau(J: int, x: float) -> float:
    """Relative remainder of the refined trig tail over the leading term at x = sqrt(delta) u."""
    n = J + 1
    return float(np.sqrt(n) / (2.0 * np.sqrt(np.pi * trig_c(J)) * x))


def trig3_density(x):
    """Density of (Z0 + sqrt(2) R) / sqrt(3), R Rayleigh, i.e. the standardized J=2 sup."""
    x = np.asarray(x, dtype=float)
    return (np.sqrt(2.0 / 3.0) * x * np.exp(-x * x / 2.0) * special.ndtr(np.sqrt(2.0) * x)
            + np.exp(-1.5 * x * x) / np.sqrt(6.0 * np.pi))


def trig3_sf(x: float) -> float:
    """Closed form of the integral of ``trig3_density`` from x to infinity."""
    return float(np.sqrt(2.0 / 3.0) * np.exp(-x * x / 2.0) * special.ndtr(np.sqrt(2.0) * x)
                 + special.ndtr(-np.sqrt(3.0) * x))


def trig_J3_exact_tail(delta: float, u: float) -> float:
    """P(sup Y > u) for the single-frequency trig cell, by quadrature of its density."""
    x0 = u * np.sqrt(delta) / np.sqrt(3.0)
    val, _ = integrate.quad(trig3_density, x0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return float(val)


def trig_J3_exact_absolute_tail(delta: float, u: float) -> float:
    """P(|Z0| + sqrt(2) R > u sqrt(delta)), R Rayleigh, by one-dimensional quadrature."""
    v = u * np.sqrt(delta)
    if v <= 0:
        return 1.0
    # condition on |Z0| = z: P(sqrt(2) R > v - z) = exp(-(v - z)^2 / 4)
    f = lambda z: 2.0 * normal_pdf(z) * np.exp(-((v - z) ** 2) / 4.0)
    inner, _ = integrate.quad(f, 0.0, v, epsabs=1e-14, epsrel=1e-12, limit=200)
    return float(inner + 2.0 * normal_sf(v))


def haar_exact_signed_tail(delta: float, u):
    """P(sup Y > u) for the Haar cell: Z0 + |Z1| is the max of two N(0, 2)."""
    x = np.asarray(u, dtype=float) * np.sqrt(delta) / np.sqrt(2.0)
    sf = special.ndtr(-x)
    return sf * (2.0 - sf)  # 1 - Phi(x)^2 without cancellation


def haar_exact_absolute_tail(delta: float, u):
    """P(sup |Y| > u) for the Haar cell: |Z0| + |Z1| = sqrt(2) max(|U|, |V|)."""
    x = np.asarray(u, dtype=float) * np.sqrt(delta) / np.sqrt(2.0)
    x = np.maximum(x, 0.0)
    c = special.erfc(x / np.sqrt(2.0))
    return c * (2.0 - c)  # 1 - erf^2 without cancellation


def haar_absolute_density(x):
    """Density of |Z0| + |Z1| written as a convolution integral."""
    x = np.asarray(x, dtype=float)
    inner = np.sqrt(np.pi) * 2.0 * special.erf(x / 2.0)  # int_{-x}^{x} exp(-v^2/4) dv
    return np.where(x > 0, np.exp(-x * x / 4.0) * inner / np.pi, 0.0)


def haar_signed_expansion(x, order: int = 0):
    """Large-x expansion of 1 - Phi(x / sqrt(2))^2 with x = sqrt(delta) u.

    Order 0 is the leading term (2 / (sqrt(pi) x)) exp(-x^2 / 4); order 2
    adds the factor (1 - 2 / x^2).
    """
    x = np.asarray(x, dtype=float)
    lead = 2.0 / np.sqrt(np.pi) / x * np.exp(-x * x / 4.0)
    if order == 0:
        return lead
    if order == 2:
        return lead * (1.0 - 2.0 / x**2)
    raise DomainError("order must be 0 or 2")


def tail_report(family: BasisFamily, delta: float, u_list, draws: np.ndarray, mode: str) -> list[dict]:
    """Rows {u, mc, mc_stderr, asymptotic, refined, exact} for the CLI."""
    mode = _mode(mode)
    u_arr = np.asarray(u_list, dtype=float)
    mc, se = empirical_tail(draws, u_arr)
    rows = []
    for u, p, e in zip(u_arr, mc, se):
        row = {"u": float(u), "mc": float(p), "mc_stderr": float(e)}
        if u > 0:
            a = asymptotic_tail(family, delta, u, mode)
            row["asymptotic"] = float(a)
            row["asymptotic_low_confidence"] = a.low_confidence
        else:
            row["asymptotic"] = None
        if family.tag == "trig" and mode == SIGNED:
            row["refined"] = trig_refined_tail(family.J, delta, u)
        if family.tag == "haar":
            fn = haar_exact_signed_tail if mode == SIGNED else haar_exact_absolute_tail
            row["exact"] = float(fn(delta, u))
        elif family.tag == "trig" and family.J == 2:
            row["exact"] = (trig_J3_exact_tail(delta, u) if mode == SIGNED
                            else trig_J3_exact_absolute_tail(delta, u))
        rows.append(row)
    return rows
