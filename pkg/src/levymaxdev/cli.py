"""Batch experiment runner.

Usage::

    levymaxdev <command> --config cfg.json [--seed N] [--out DIR] [--workers K]

Commands: simulate, mc-sup, tails, gumbel, band, smalltime.  Every output
file carries the sha256 of (command, config, seed).  Exit codes: 0 success,
2 configuration error, 3 numeric guard tripped.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import bands, gausssup, levy, limits
from .basis import BasisFamily, BasisSystem, Window
from .errors import DomainError, HypothesisError, ParameterError
from .estimator import projection_estimate
from .io import config_hash, write_csv, write_json


class ConfigError(ValueError):
    pass


def _get(cfg: dict, key: str, kind=None, default=...):
    if key not in cfg or cfg[key] is None:
        if default is ...:
            raise ConfigError(f"missing config key {key!r}")
        return default
    val = cfg[key]
    if kind is not None and (not isinstance(val, kind) or isinstance(val, bool)):
        raise ConfigError(f"config key {key!r} has the wrong type")
    return val


def _family(cfg: dict) -> BasisFamily:
    tag = _get(cfg, "family", str)
    J = _get(cfg, "J", int, 1 if tag == "haar" else ...)
    return BasisFamily(tag, J)


def _window(cfg: dict, default=None) -> Window:
    w = _get(cfg, "window", list, default)
    if not isinstance(w, (list, tuple)) or len(w) != 2:
        raise ConfigError("window must be a list [a, b]")
    return Window(*map(float, w))


def _model(cfg: dict):
    d = _get(cfg, "model", dict)
    try:
        return levy.model_from_dict(d)
    except KeyError as exc:
        raise ConfigError(f"model lacks parameter {exc}") from None


def _u_list(cfg: dict) -> np.ndarray:
    u = _get(cfg, "u", list)
    if not u:
        raise ConfigError("u list is empty")
    return np.asarray(u, dtype=float)


def _horizon(cfg: dict) -> tuple[int, float, float | None]:
    """(n, delta, kappa) from either delta or kappa."""
    n = _get(cfg, "n", int)
    if n < 1:
        raise ConfigError("n must be positive")
    if "kappa" in cfg:
        kappa = float(_get(cfg, "kappa", (int, float)))
        return n, float(n) ** kappa / n, kappa
    return n, float(_get(cfg, "delta", (int, float))), None


# ------------------------------------------------------------ commands

def run_simulate(cfg, seed, out, workers, h):
    model = _model(cfg)
    n, delta, kappa = _horizon(cfg)
    sample = levy.sample_increments(model, n, delta, seed, workers)
    levy.write_increments(sample, out / "increments.csv", h)
    return {"files": ["increments.csv", "increments.json"], "n": n, "delta": delta, "T": sample.T}


def run_mc_sup(cfg, seed, out, workers, h):
    fam = _family(cfg)
    mode = _get(cfg, "mode", str, "signed")
    grid = _get(cfg, "grid", int, None)
    delta = float(_get(cfg, "delta", (int, float), gausssup.unit_variance_delta(fam)))
    config = gausssup.SupSampleConfig(fam, delta, _get(cfg, "reps", int), seed, mode, grid)
    if grid is None and not config.exact_path():
        config = gausssup.SupSampleConfig(fam, delta, config.reps, seed, mode, 1024)
    u = _u_list(cfg)
    draws = gausssup.sample_sup(config, workers)
    write_csv(out / "draws.csv", {"replicate": np.arange(draws.size), "value": draws}, h)
    rows = gausssup.tail_report(fam, delta, u, draws, config.mode)
    write_json(out / "tails.json", {"family": fam.tag, "J": fam.J, "delta": delta, "mode": config.mode,
                                    "grid": config.grid, "reps": config.reps, "rows": rows}, h)
    return {"files": ["draws.csv", "tails.json"], "rows": rows}


def run_tails(cfg, seed, out, workers, h):
    fam = _family(cfg)
    mode = _get(cfg, "mode", str, "signed")
    u = _u_list(cfg)
    window = _window(cfg) if "window" in cfg else None
    m = _get(cfg, "m", int, None)
    if window is not None and m is not None:
        delta = window.length / m
    else:
        delta = float(_get(cfg, "delta", (int, float)))
    rows = []
    for uu in u:
        a = gausssup.asymptotic_tail(fam, delta, uu, mode)
        row = {"u": uu, "asymptotic": float(a), "asymptotic_low_confidence": a.low_confidence}
        if window is not None and m is not None:
            row["m_scale"] = float(gausssup.m_scale_tail(fam, window, m, uu, mode))
        if fam.tag == "trig" and mode == "signed":
            row["refined"] = gausssup.trig_refined_tail(fam.J, delta, uu)
        if fam.tag == "haar":
            fn = gausssup.haar_exact_signed_tail if mode == "signed" else gausssup.haar_exact_absolute_tail
            row["exact"] = float(fn(delta, uu))
        elif fam.tag == "trig" and fam.J == 2:
            row["exact"] = (gausssup.trig_J3_exact_tail(delta, uu) if mode == "signed"
                            else gausssup.trig_J3_exact_absolute_tail(delta, uu))
        rows.append(row)
    ta = gausssup.tail_constants(fam)
    write_json(out / "tails.json", {"family": fam.tag, "J": fam.J, "delta": delta, "mode": mode,
                                    "k": ta.k, "g1": ta.g1, "g2": ta.g2, "rows": rows}, h)
    return {"files": ["tails.json"], "rows": rows}


def _y_grid(cfg) -> np.ndarray:
    y = cfg.get("y", {"min": -3.0, "max": 8.0, "num": 221})
    if isinstance(y, list):
        if not y:
            raise ConfigError("y grid is empty")
        return np.asarray(y, dtype=float)
    if not isinstance(y, dict):
        raise ConfigError("y must be a list or {min, max, num}")
    return np.linspace(float(y["min"]), float(y["max"]), int(y["num"]))


def run_gumbel(cfg, seed, out, workers, h):
    fcfg = {"family": "trig", **cfg}
    if fcfg["family"] == "trig":
        fcfg.setdefault("J", 2)
    fam = _family(fcfg)
    window = _window(cfg, [0.0, 1.0])
    ms = _get(cfg, "m", list)
    if not ms or not all(isinstance(m, int) and not isinstance(m, bool) and m >= 1 for m in ms):
        raise ConfigError("m must be a nonempty list of positive integers")
    reps = _get(cfg, "reps", int)
    grid = _get(cfg, "grid", int, None)
    want_a = bool(cfg.get("accompanying", fam.tag == "trig"))
    boundary = bool(cfg.get("boundary_term", True))
    if want_a:
        if fam.tag != "trig":
            raise ConfigError("accompanying laws exist for the trig family only")
        if gausssup.effective_order(fam) < window.length:
            raise HypothesisError("accompanying laws require J + 1 >= b - a")
    bias = cfg.get("bias")
    y_grid = _y_grid(cfg)
    table = {k: [] for k in ("m", "y", "empirical", "gumbel", "A_m", "A_m_minus", "A_m_plus")}
    dist = {}
    for m in ms:
        w = limits.sample_cell_maxima(fam, window, m, reps, seed, grid, workers)
        comp = limits.compare_laws(w, fam, window, m, boundary, want_a)
        if bias:
            cols = limits.law_table(comp, y_grid, bias["n"], bias["kappa"], float(bias["brevec"]), want_a)
        else:
            cols = limits.law_table(comp, y_grid, accompanying=want_a)
        for key in table:
            if key == "m":
                table["m"].extend([m] * y_grid.size)
            else:
                table[key].extend(cols.get(key, np.full(y_grid.size, np.nan)))
        dist[str(m)] = {"ks_gumbel": comp.ks_gumbel, "levy_gumbel": comp.levy_gumbel,
                        "ks_accompanying": comp.ks_accompanying,
                        "levy_accompanying": comp.levy_accompanying,
                        "a_m": comp.params.a_m, "b_m": comp.params.b_m, "c_m": comp.params.c_m}
    write_csv(out / "law_table.csv", table, h)
    ks = [dist[str(m)]["ks_gumbel"] for m in ms]
    summary = {"family": fam.tag, "J": fam.J, "window": [window.a, window.b], "reps": reps,
               "distances": dist,
               "ks_gumbel_nonincreasing": bool(all(a >= b for a, b in zip(ks, ks[1:])))}
    write_json(out / "distances.json", summary, h)
    return {"files": ["law_table.csv", "distances.json"], **summary}


def run_band(cfg, seed, out, workers, h):
    fam = _family(cfg)
    window = _window(cfg).require_away_from_zero()
    level = float(_get(cfg, "level", (int, float), 0.9))
    reps = _get(cfg, "reps", int, 1)
    eps = float(_get(cfg, "eps", (int, float), bands.EPS_FLOOR))
    quantile = _get(cfg, "quantile", str, "gumbel")
    cap = float(_get(cfg, "lambda_cap", (int, float), bands.LAMBDA_CAP))
    model = _model(cfg) if "model" in cfg else None
    if "increments" in cfg:
        try:
            sample = levy.read_increments(_get(cfg, "increments", str))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"increments rejected: {exc}") from None
        n, T = sample.n, sample.T
        kappa = float(cfg["kappa"]) if "kappa" in cfg else float(np.log(T) / np.log(n))
        if abs(float(n) ** kappa - T) > 1e-9 * T:
            raise ConfigError("increments do not satisfy T = n^kappa for the given kappa")
        if model is None:
            model = sample.model
        reps = 1
    else:
        if model is None:
            raise ConfigError("band needs a model or an increments file")
        n = _get(cfg, "n", int)
        kappa = float(_get(cfg, "kappa", (int, float)))
        T = float(n) ** kappa
        sample = None
    m_cfg = cfg.get("m", "optimal")
    m = limits.optimal_m(n, kappa) if m_cfg == "optimal" else int(m_cfg)
    lam = bands.check_design(n, m, kappa, cap)
    q = cfg.get("q")
    if q is None and model is not None:
        q = 2.0 * levy.fitted_q(model, window)
    bias = limits.bias_constants(fam, window, float(q), kappa) if q is not None else None
    if bias is None:
        warnings.warn("no q available: band built without the bias shift", RuntimeWarning)
    system = BasisSystem(fam, window, m)
    if sample is None:
        sample = levy.sample_increments(model, n, T / n, bands.replicate_seed(seed, 0), workers)
    est = projection_estimate(sample, system)
    band = bands.confidence_band(est, eps, bias, level, cfg.get("grid"), quantile)
    write_csv(out / "band.csv", {"x": band.x, "lower": band.lower, "estimate": band.estimate,
                                 "upper": band.upper}, h)
    files = ["band.csv"]
    summary = {"n": n, "kappa": kappa, "T": T, "m": m, "lambda_n": lam, "level": level,
               "q": q, "half_width_scale": band.half_width_scale}
    if reps > 1:
        res = bands.coverage_experiment(model, fam, kappa, n, level, reps, seed, window, q, m,
                                        quantile, workers, cap)
        summary.update(res.summary())
        write_json(out / "coverage.json", summary, h)
        files.append("coverage.json")
    return {"files": files, **summary}


def run_smalltime(cfg, seed, out, workers, h):
    model = _model(cfg)
    window = _window(cfg).require_away_from_zero()
    deltas = [float(d) for d in _get(cfg, "deltas", list, [1e-2, 1e-3, 1e-4])]
    grid = _get(cfg, "grid", int, 1001)
    vals = [levy.small_time_check(model, window, d, grid) for d in deltas]
    ratios = [v / d for v, d in zip(vals, deltas)]
    write_csv(out / "smalltime.csv", {"delta": deltas, "value": vals, "ratio": ratios}, h)
    summary = {"rows": [{"delta": d, "value": v, "ratio": r} for d, v, r in zip(deltas, vals, ratios)],
               "q_fit": max(ratios), "q_default": 2.0 * max(ratios)}
    write_json(out / "smalltime.json", summary, h)
    return {"files": ["smalltime.csv", "smalltime.json"], **summary}


COMMANDS = {
    "simulate": run_simulate,
    "mc-sup": run_mc_sup,
    "tails": run_tails,
    "gumbel": run_gumbel,
    "band": run_band,
    "smalltime": run_smalltime,
}


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="levymaxdev", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--seed", type=int, default=None, help="master seed (u64), overrides config")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--workers", type=int, default=1, help="worker processes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = json.loads(Path(args.config).read_text())
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        if not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if args.workers < 1:
            raise ConfigError("workers must be >= 1")
    except (OSError, ValueError) as exc:
        return _fail("config", str(exc), 2)
    cfg.pop("seed", None)
    h = config_hash(args.command, cfg, seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        summary = COMMANDS[args.command](cfg, seed, out, args.workers, h)
    except ParameterError as exc:
        return _fail("numeric_guard", str(exc), 3)
    except (ConfigError, DomainError, HypothesisError, KeyError, TypeError) as exc:
        return _fail("config", str(exc), 2)
    summary["config_sha256"] = h
    sys.stdout.write(json.dumps(summary, default=float, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
