"""Config-driven experiment runner.

Config files are flat ``key = value`` lines; ``#`` starts a comment.  Values
parse as int, float, an inclusive int range ``a..b``, or a bare string.
Every experiment that draws random numbers requires an explicit ``seed``.

Registered experiments and their keys (``*`` = required)::

    fig1         m*, out, svg
    fig3         m*, proposal (sobol|random), density (quad|polysine), seed, out, svg
    cud_profile  s_max, modulus, multiplier, increment, lcg_seed, out, svg
    pushback     chain (shift|metropolis), driver (lcg|vdc|random), N*, M*,
                 family (anchored|interval), resolution, seed*, x0, out
    disc_sweep   generator*, s*, m*, q, candidates, seed, out, svg
"""

from __future__ import annotations

import re
from pathlib import Path

from . import arsampler, boxdisc, cudmcmc, pointset, sphere
from .csvio import write_csv
from .plotting import convergence_plot

__all__ = ["ConfigError", "parse_config", "load_config", "run_experiment", "EXPERIMENTS",
           "make_driver", "make_chain"]


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending key."""


_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def _parse_value(text: str):
    m = _RANGE.match(text)
    if m:
        return range(int(m.group(1)), int(m.group(2)) + 1)
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text.strip().strip('"').strip("'")


def parse_config(text: str) -> dict:
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in cfg:
            raise ConfigError(f"duplicate key {key!r}")
        cfg[key] = _parse_value(value)
    return cfg


def load_config(path) -> dict:
    return parse_config(Path(path).read_text())


def _check_keys(cfg: dict, allowed: set, required: set) -> None:
    for key in cfg:
        if key not in allowed | required | {"experiment"}:
            raise ConfigError(f"unknown key {key!r} for experiment {cfg.get('experiment')!r}")
    for key in required:
        if key not in cfg:
            raise ConfigError(f"missing required key {key!r}")


def _int_range(cfg: dict, key: str) -> range:
    v = cfg[key]
    if isinstance(v, int):
        return range(v, v + 1)
    if not isinstance(v, range) or len(v) == 0:
        raise ConfigError(f"key {key!r} must be an int or a non-empty range a..b")
    return v


def _choice(cfg: dict, key: str, options, default):
    v = cfg.get(key, default)
    if v not in options:
        raise ConfigError(f"key {key!r} must be one of {sorted(options)}, got {v!r}")
    return v


def _seed(cfg: dict):
    if "seed" not in cfg:
        raise ConfigError("missing required key 'seed' (randomized experiments need an explicit seed)")
    if not isinstance(cfg["seed"], int) or cfg["seed"] < 0:
        raise ConfigError("key 'seed' must be a non-negative integer")
    return cfg["seed"]


def make_driver(kind: str, seed=None, **lcg) -> cudmcmc.DriverSequence:
    if kind == "lcg":
        return cudmcmc.lcg_driver(**lcg)
    if kind == "vdc":
        return cudmcmc.vdc_driver()
    if kind == "random":
        if seed is None:
            raise ConfigError("random driver requires an explicit seed")
        return cudmcmc.random_driver(seed)
    raise ConfigError(f"unknown driver {kind!r}")


def make_chain(kind: str, density: str = "quad", x0=None) -> cudmcmc.ChainSpec:
    if kind == "shift":
        return cudmcmc.shift_chain(0.0 if x0 is None else x0)
    if kind == "metropolis":
        return cudmcmc.metropolis_chain(arsampler.DENSITIES[density](), 0.5 if x0 is None else x0)
    raise ConfigError(f"unknown chain {kind!r}")


def _fig1(cfg):
    _check_keys(cfg, {"out", "svg"}, {"m"})
    m = _int_range(cfg, "m")
    rows = sphere.figure1_experiment(m.start, m.stop - 1)
    header = ["m", "N", "disc_sq", "ref_lo", "ref_hi"]
    plot = dict(N=[r[1] for r in rows], values=[r[2] for r in rows],
                refs=[("N^-3/2", [r[3] for r in rows]), ("(9/4) N^-3/2", [r[4] for r in rows])],
                label="squared cap L2 discrepancy")
    return header, rows, plot


def _fig3(cfg):
    _check_keys(cfg, {"out", "svg", "proposal", "density", "seed"}, {"m"})
    m = _int_range(cfg, "m")
    proposal = _choice(cfg, "proposal", {"sobol", "random"}, "sobol")
    density = arsampler.DENSITIES[_choice(cfg, "density", {"quad", "polysine"}, "quad")]()
    seed = _seed(cfg) if proposal == "random" else cfg.get("seed")
    kind = "sobol_net" if proposal == "sobol" else "random"
    rows = arsampler.figure3_experiment(m.start, m.stop - 1, kind, seed=seed, density=density)
    header = ["m", "M", "N", "disc", "ref_07", "ref_05", "accept_ratio"]
    plot = dict(N=[r[2] for r in rows], values=[r[3] for r in rows],
                refs=[("N^-0.7", [r[4] for r in rows]), ("N^-0.5", [r[5] for r in rows])],
                label="D*(Q)")
    return header, rows, plot


def _cud_profile(cfg):
    _check_keys(cfg, {"out", "svg", "s_max", "modulus", "multiplier", "increment", "lcg_seed"}, set())
    s_max = cfg.get("s_max", 3)
    lcg = {k: cfg[c] for k, c in (("modulus", "modulus"), ("multiplier", "multiplier"),
                                  ("increment", "increment"), ("seed", "lcg_seed")) if c in cfg}
    seq = cudmcmc.lcg_driver(**lcg)
    rows = []
    for s in range(1, s_max + 1):
        for N in dyadic_prefixes(seq.length // s):
            val = boxdisc.star_disc_grid_exact(cudmcmc.block(seq, N, s), max_points=seq.length).value
            rows.append((s, N, val))
    header = ["s", "N", "star_disc"]
    first = [r for r in rows if r[0] == 1]
    plot = dict(N=[r[1] for r in first], values=[r[2] for r in first], refs=[], label="D* (s=1)")
    return header, rows, plot


def dyadic_prefixes(n_max: int) -> list:
    """``1, 2, 4, ...`` up to ``n_max``, with ``n_max`` itself appended."""
    out = [1 << k for k in range(n_max.bit_length()) if (1 << k) <= n_max]
    if out[-1] != n_max:
        out.append(n_max)
    return out


def _pushback(cfg):
    _check_keys(cfg, {"out", "chain", "driver", "family", "resolution", "x0", "density"},
                {"N", "M", "seed"})
    seed = _seed(cfg)
    chain = make_chain(_choice(cfg, "chain", {"shift", "metropolis"}, "shift"),
                       cfg.get("density", "quad"), cfg.get("x0"))
    seq = make_driver(_choice(cfg, "driver", {"lcg", "vdc", "random"}, "lcg"), seed=seed)
    family = cudmcmc.TestSetFamily(_choice(cfg, "family", {"anchored", "interval"}, "anchored"),
                                   cfg.get("resolution", 8))
    rows = []
    for N in _int_range(cfg, "N"):
        res = cudmcmc.pushback_disc_mc(chain, seq, N, family, cfg["M"], seed)
        rows.append((family.kind, N, res.value, res.error_hint))
    return ["family", "N", "value", "error_hint"], rows, None


def _disc_sweep(cfg):
    _check_keys(cfg, {"out", "svg", "q", "candidates", "seed"}, {"generator", "s", "m"})
    gen = cfg["generator"]
    s = cfg["s"]
    q = float(cfg.get("q", 2))
    rows = []
    for m in _int_range(cfg, "m"):
        N = 1 << m
        if gen == "sobol_net":
            P = pointset.sobol_net(m, s)
        elif gen in ("random", "stratified"):
            seed = _seed(cfg)
            P = pointset.random_uniform(N, s, seed + m) if gen == "random" else \
                pointset.stratified(max(0, round(m / s)), s, seed + m)
        elif gen in ("halton", "hammersley"):
            P = getattr(pointset, gen)(N, s)
        else:
            raise ConfigError(f"key 'generator' must be sobol_net, halton, hammersley, random or stratified, got {gen!r}")
        try:
            star = boxdisc.star_disc_grid_exact(P)
        except (boxdisc.BudgetExceededError, ValueError):
            star = boxdisc.star_disc_estimate(P, cfg.get("candidates", 20000), cfg.get("seed", 0))
        lq = boxdisc.l2_star_closed_form(P) if q == 2 else boxdisc.lq_disc_mc(P, q, 100_000, cfg.get("seed", 0))
        rows.append((m, P.n_points, star.value, star.method, lq.value))
    header = ["m", "N", "star_disc", "star_method", f"l{q:g}_disc"]
    plot = dict(N=[r[1] for r in rows], values=[r[2] for r in rows],
                refs=[(f"L{q:g}", [r[4] for r in rows])], label="star discrepancy")
    return header, rows, plot


EXPERIMENTS = {
    "fig1": _fig1,
    "fig3": _fig3,
    "cud_profile": _cud_profile,
    "pushback": _pushback,
    "disc_sweep": _disc_sweep,
}


def run_experiment(config, out=None, svg=None):
    """Run a registered experiment from a config dict or file path.

    Writes the CSV to ``out`` (config key ``out``; stdout if neither is set)
    and, for experiments with a convergence table, a log-log figure to
    ``svg`` (config key ``svg``).  Returns ``(header, rows)``.
    """
    cfg = dict(config) if isinstance(config, dict) else load_config(config)
    name = cfg.get("experiment")
    if name not in EXPERIMENTS:
        raise ConfigError(f"key 'experiment' must be one of {sorted(EXPERIMENTS)}, got {name!r}")
    header, rows, plot = EXPERIMENTS[name](cfg)
    write_csv(out or cfg.get("out"), header, rows)
    svg = svg or cfg.get("svg")
    if svg and plot is not None:
        convergence_plot(svg, **plot, title=name)
    return header, rows
