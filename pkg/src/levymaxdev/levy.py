"""Spectrally positive Levy models with closed-form transition laws.

Two pure-jump models are provided:

* ``CompoundPoissonExp(lam, eta)``: jumps at rate ``lam`` with Exp(eta) sizes,
  Levy density ``lam * eta * exp(-eta x)``;
* ``GammaProcess(c, rho)``: X_t ~ Gamma(shape c t, rate rho),
  Levy density ``c exp(-rho x) / x``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special, stats

from . import _rng
from .basis import Window
from .errors import DomainError
from .io import write_csv, write_json

INCREMENT_BLOCK = 1 << 16
POISSON_TAIL_TOL = 1e-12


def _positive(name, value):
    value = float(value)
    if not (np.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a finite positive number, got {value}")
    return value


def _positive_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("the Levy density lives on x > 0")
    return x


@dataclass(frozen=True)
class CompoundPoissonExp:
    lam: float
    eta: float
    kind: str = field(default="cp_exp", init=False)

    def __post_init__(self):
        object.__setattr__(self, "lam", _positive("lam", self.lam))
        object.__setattr__(self, "eta", _positive("eta", self.eta))

    def to_dict(self):
        return {"kind": self.kind, "lam": self.lam, "eta": self.eta}


@dataclass(frozen=True)
class GammaProcess:
    c: float
    rho: float
    kind: str = field(default="gamma", init=False)

    def __post_init__(self):
        object.__setattr__(self, "c", _positive("c", self.c))
        object.__setattr__(self, "rho", _positive("rho", self.rho))

    def to_dict(self):
        return {"kind": self.kind, "c": self.c, "rho": self.rho}


LevyModel = CompoundPoissonExp | GammaProcess


def model_from_dict(d: dict) -> LevyModel:
    kind = d.get("kind")
    if kind == "cp_exp":
        return CompoundPoissonExp(d["lam"], d["eta"])
    if kind == "gamma":
        return GammaProcess(d["c"], d["rho"])
    raise DomainError(f"unknown model kind {kind!r}")


def levy_density(model: LevyModel, x):
    x = _positive_x(x)
    if isinstance(model, CompoundPoissonExp):
        return model.lam * model.eta * np.exp(-model.eta * x)
    return model.c * np.exp(-model.rho * x) / x


def levy_tail(model: LevyModel, x):
    """Tail mass nu([x, inf)) of the Levy measure."""
    x = _positive_x(x)
    if isinstance(model, CompoundPoissonExp):
        return model.lam * np.exp(-model.eta * x)
    return model.c * special.exp1(model.rho * x)


# ---------------------------------------------------------------- transition

def _poisson_kmax(mu: float) -> int:
    """Smallest K with P(N > K) < POISSON_TAIL_TOL for N ~ Poisson(mu)."""
    k = max(1, int(mu + 10 * np.sqrt(mu) + 10))
    while stats.poisson.sf(k, mu) >= POISSON_TAIL_TOL:
        k *= 2
    lo, hi = 0, k
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if stats.poisson.sf(mid, mu) < POISSON_TAIL_TOL:
            hi = mid
        else:
            lo = mid
    return hi


def transition_atom(model: LevyModel, delta: float) -> float:
    """Probability mass of X_delta at zero."""
    delta = _positive("delta", delta)
    if isinstance(model, CompoundPoissonExp):
        return float(np.exp(-model.lam * delta))
    return 0.0


def transition_density(model: LevyModel, delta: float, x):
    """Density of the absolutely continuous part of X_delta.

    For the compound Poisson model the atom at 0 is excluded (see
    ``transition_atom``).  Zero for x < 0.
    """
    delta = _positive("delta", delta)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    if isinstance(model, GammaProcess):
        out[pos] = stats.gamma.pdf(xp, model.c * delta, scale=1.0 / model.rho)
        return out[()] if x.ndim == 0 else out
    mu = model.lam * delta
    ks = np.arange(1, _poisson_kmax(mu) + 1)
    w = stats.poisson.pmf(ks, mu)
    dens = stats.gamma.pdf(xp[:, None], ks[None, :], scale=1.0 / model.eta)
    out[pos] = dens @ w
    return out[()] if x.ndim == 0 else out


def transition_sf(model: LevyModel, delta: float, x):
    """P(X_delta >= x) for x > 0, via regularized incomplete gamma functions."""
    delta = _positive("delta", delta)
    x = _positive_x(x)
    if isinstance(model, GammaProcess):
        return special.gammaincc(model.c * delta, model.rho * x)
    mu = model.lam * delta
    ks = np.arange(1, _poisson_kmax(mu) + 1)
    w = stats.poisson.pmf(ks, mu)
    val = special.gammaincc(ks[None, :], model.eta * np.atleast_1d(x)[:, None]) @ w
    return val.reshape(x.shape)[()] if x.ndim == 0 else val


def transition_cdf(model: LevyModel, delta: float, x):
    """Full CDF of X_delta including the atom."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[x == 0] = transition_atom(model, delta)
    if np.any(pos):
        out[pos] = 1.0 - transition_sf(model, delta, x[pos])
    return out[()] if x.ndim == 0 else out


def small_time_check(model: LevyModel, window: Window, delta: float, grid: int = 1001) -> float:
    """sup over a uniform grid on the window of |P(X_delta >= x)/delta - nu[x, inf)|."""
    if window.a <= 0:
        raise DomainError("small-time check needs a window inside (0, inf)")
    window.require_away_from_zero()
    if grid < 1:
        raise DomainError("grid must be positive")
    x = np.linspace(window.a, window.b, int(grid)) if grid > 1 else np.array([window.a])
    gap = np.abs(transition_sf(model, delta, x) / delta - levy_tail(model, x))
    return float(np.max(gap))


def fitted_q(model: LevyModel, window: Window, deltas=(1e-2, 1e-3, 1e-4), grid: int = 1001) -> float:
    """Empirical small-time constant: max over deltas of small_time_check / delta."""
    return max(small_time_check(model, window, d, grid) / d for d in deltas)


# ---------------------------------------------------------------- sampling

@dataclass(frozen=True, eq=False)
class IncrementSample:
    """n i.i.d. increments of a Levy process observed with step delta."""

    delta: float
    values: np.ndarray
    seed: int | None = None
    model: LevyModel | None = None

    def __post_init__(self):
        object.__setattr__(self, "delta", _positive("delta", self.delta))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).ravel())

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def T(self) -> float:
        return self.n * self.delta

    def sidecar(self) -> dict:
        return {"model": None if self.model is None else self.model.to_dict(),
                "n": self.n, "delta": self.delta, "seed": self.seed}


def _sample_block(args):
    model, delta, seed, block, size = args
    rng = _rng.block_generator(seed, _rng.TAG_INCREMENTS, block)
    if isinstance(model, GammaProcess):
        return rng.gamma(model.c * delta, 1.0 / model.rho, size)
    # the sum of N Exp(eta) jumps is Gamma(N, eta) given N >= 1
    counts = rng.poisson(model.lam * delta, size)
    out = np.zeros(size)
    hit = counts > 0
    out[hit] = rng.gamma(counts[hit], 1.0 / model.eta)
    return out


def sample_increments(model: LevyModel, n: int, delta: float, seed: int, workers: int = 1) -> IncrementSample:
    """Exact i.i.d. draws of X_delta.

    Increments are generated in blocks of 65536, block ``b`` from its own
    counter-based stream keyed by (seed, b), so the output is identical for
    any worker count.
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    delta = _positive("delta", delta)
    seed = _rng.check_seed(seed)
    jobs = [(model, delta, seed, b, size)
            for b, size in enumerate(_rng.block_sizes(int(n), INCREMENT_BLOCK))]
    values = np.concatenate(_rng.parallel_map(_sample_block, jobs, workers))
    return IncrementSample(delta, values, seed, model)


def write_increments(sample: IncrementSample, path, config_hash: str | None = None) -> None:
    """CSV with a single ``increment`` column plus a JSON sidecar next to it."""
    path = Path(path)
    write_csv(path, {"increment": sample.values}, config_hash)
    write_json(path.with_suffix(".json"), sample.sidecar(), config_hash)


def read_increments(path) -> IncrementSample:
    """Inverse of ``write_increments``; raises ValueError on schema problems."""
    path = Path(path)
    side = path.with_suffix(".json")
    if not side.exists():
        raise ValueError(f"missing sidecar {side}")
    meta = json.loads(side.read_text())
    if "delta" not in meta:
        raise ValueError("sidecar lacks 'delta'")
    rows = [ln.strip() for ln in path.read_text().splitlines()
            if ln.strip() and not ln.startswith("#")]
    if not rows or rows[0] != "increment":
        raise ValueError("increments CSV must have the single header 'increment'")
    try:
        values = np.array([float(r) for r in rows[1:]])
    except ValueError as exc:
        raise ValueError(f"non-numeric increment: {exc}") from None
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise ValueError("increments must be a nonempty list of finite numbers")
    if "n" in meta and meta["n"] != values.size:
        raise ValueError("sidecar n does not match the row count")
    model = model_from_dict(meta["model"]) if meta.get("model") else None
    return IncrementSample(meta["delta"], values, meta.get("seed"), model)
