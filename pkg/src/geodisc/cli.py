"""Command-line entry point: ``geodisc <subcommand> ...``.

Every subcommand writes CSV to ``--out`` (stdout when omitted) and exits 0 on
success.  Errors print a single ``geodisc: error: ...`` line to stderr and
exit with status 2.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import arsampler, boxdisc, cudmcmc, geomdisc, pointset, sphere
from .csvio import read_csv, write_csv, write_results
from .experiments import ConfigError, make_chain, make_driver, run_experiment
from .plotting import convergence_plot
from .rates import rate_fit

__all__ = ["main", "build_parser"]


def _q(text: str) -> float:
    if text.lower() in ("inf", "infinity", "star"):
        return math.inf
    q = float(text)
    if q < 1:
        raise argparse.ArgumentTypeError(f"q must be >= 1 or 'inf', got {text!r}")
    return q


def _cmd_generate(args):
    params = {k: v for k, v in (("N", args.n), ("s", args.s), ("m", args.m), ("k", args.k),
                                ("b", args.b), ("seed", args.seed)) if v is not None}
    P = pointset.generate(args.kind, **params)
    if args.out in (None, "-"):
        write_csv(None, [f"dim{j}" for j in range(P.s)], P.coords.tolist())
    else:
        pointset.write_points_csv(P, args.out)


def _cmd_disc(args):
    P = pointset.read_points_csv(args.points)
    results = []
    for q in args.q:
        if math.isinf(q):
            if args.method == "exact":
                results.append(boxdisc.star_disc_grid_exact(P))
            else:
                results.append(boxdisc.star_disc_estimate(P, args.candidates, args.seed))
        elif P.s == 1 and args.method == "exact":
            results.append(boxdisc.lq_disc_1d_exact(P, q))
        elif q == 2 and args.method == "exact":
            results.append(boxdisc.l2_star_closed_form(P))
        else:
            results.append(boxdisc.lq_disc_mc(P, q, args.samples, args.seed))
    write_results(args.out, results)


def _cmd_geomdisc(args):
    P = pointset.read_points_csv(args.points)
    if args.family == "halfplane":
        res = geomdisc.halfplane_disc_exact(P) if args.method == "exact" \
            else geomdisc.halfplane_disc_sweep(P, args.angles)
    elif args.family == "torus_disc":
        res = geomdisc.torus_disc_disc(P, args.centers, args.radii)
    else:
        res = geomdisc.convex_hull_lowerbound(P, args.trials, args.seed, args.angles)
    write_results(args.out, [res])


def _cmd_sphere(args):
    if args.figure1:
        rows = sphere.figure1_experiment(args.m_min, args.m_max)
        write_csv(args.out, ["m", "N", "disc_sq", "ref_lo", "ref_hi"], rows)
        if args.svg:
            convergence_plot(args.svg, [r[1] for r in rows], [r[2] for r in rows],
                             refs=[("N^-3/2", [r[3] for r in rows]),
                                   ("(9/4) N^-3/2", [r[4] for r in rows])],
                             label="squared cap L2 discrepancy")
        return
    if args.points is None:
        raise ValueError("sphere needs --points or --figure1")
    S = sphere.lambert_map(pointset.read_points_csv(args.points))
    if args.map_out:
        write_csv(args.map_out, ["x", "y", "z"], S.coords.tolist())
    res = [sphere.cap_l2_disc_closed_form(S)]
    if args.quadrature:
        res.append(sphere.cap_l2_disc_quadrature(S))
    write_results(args.out, res)


def _cmd_ar(args):
    kind = "sobol_net" if args.proposal == "sobol" else "random"
    if kind == "random" and args.seed is None:
        raise ValueError("--proposal random requires --seed")
    rows = arsampler.figure3_experiment(args.m_min, args.m_max, kind, seed=args.seed,
                                        density=arsampler.DENSITIES[args.density]())
    write_csv(args.out, ["m", "M", "N", "disc", "ref_07", "ref_05", "accept_ratio"], rows)
    if args.svg:
        convergence_plot(args.svg, [r[2] for r in rows], [r[3] for r in rows],
                         refs=[("N^-0.7", [r[4] for r in rows]), ("N^-0.5", [r[5] for r in rows])],
                         label="D*(Q)")


def _driver(args):
    return make_driver(args.driver, seed=args.seed)


def _cmd_mcmc(args):
    chain = make_chain(args.chain, args.density, args.x0)
    path = cudmcmc.run_chain(chain, _driver(args), args.n)
    write_csv(args.out, ["n", "state"], [(i + 1, x) for i, x in enumerate(path)])


def _cmd_pushback(args):
    if args.seed is None:
        raise ValueError("pushback requires --seed for the Monte Carlo oracle")
    chain = make_chain(args.chain, args.density, args.x0)
    family = cudmcmc.TestSetFamily(args.family, args.resolution)
    res = cudmcmc.pushback_disc_mc(chain, _driver(args), args.N, family, args.M, args.seed)
    write_csv(args.out, ["family", "N", "value", "error_hint"],
              [(family.kind, args.N, res.value, res.error_hint)])


def _cmd_ratefit(args):
    header, rows = read_csv(args.csv)
    for col in (args.x, args.y):
        if col not in header:
            raise ValueError(f"column {col!r} not in {args.csv} (has {','.join(header)})")
    ix, iy = header.index(args.x), header.index(args.y)
    fit = rate_fit([(r[ix], r[iy]) for r in rows], args.drop_first)
    write_csv(args.out, ["slope", "intercept", "r_squared", "points_used"],
              [(fit.slope, fit.intercept, fit.r_squared, fit.points_used)])


def _cmd_run(args):
    run_experiment(args.config, out=args.out, svg=args.svg)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geodisc", description="Geometric discrepancy toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out", default=None, help="output CSV (default: stdout)")
        return p

    p = add("generate", _cmd_generate, "generate a point set")
    p.add_argument("kind", choices=["van_der_corput", "halton", "hammersley", "sobol_net",
                                    "fibonacci", "random", "stratified"])
    p.add_argument("--n", "-N", dest="n", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--seed", type=int)

    p = add("disc", _cmd_disc, "anchored-box discrepancies of a point CSV")
    p.add_argument("points")
    p.add_argument("--q", type=_q, nargs="+", default=[math.inf], help="exponents; 'inf' for star")
    p.add_argument("--method", choices=["exact", "estimate"], default="exact")
    p.add_argument("--candidates", type=int, default=20000)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = add("geomdisc", _cmd_geomdisc, "convex and smooth-convex discrepancies of a 2-d point CSV")
    p.add_argument("points")
    p.add_argument("--family", choices=["halfplane", "torus_disc", "convex_hull"], default="halfplane")
    p.add_argument("--method", choices=["exact", "sweep"], default="exact")
    p.add_argument("--angles", type=int, default=256)
    p.add_argument("--centers", type=int, default=16)
    p.add_argument("--radii", type=int, default=16)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = add("sphere", _cmd_sphere, "spherical-cap discrepancy and the sphere convergence study")
    p.add_argument("--points", help="2-d point CSV to Lambert-map onto the sphere")
    p.add_argument("--map-out", help="write the mapped points as x,y,z CSV")
    p.add_argument("--quadrature", action="store_true", help="also evaluate by direct quadrature")
    p.add_argument("--figure1", action="store_true", help="run the digital-net convergence study")
    p.add_argument("--m-min", type=int, default=4)
    p.add_argument("--m-max", type=int, default=12)
    p.add_argument("--svg")

    p = add("ar", _cmd_ar, "acceptance-rejection convergence study")
    p.add_argument("--density", choices=sorted(k for k in arsampler.DENSITIES if k != "uniform"),
                   default="quad")
    p.add_argument("--proposal", choices=["sobol", "random"], default="sobol")
    p.add_argument("--m-min", type=int, default=6)
    p.add_argument("--m-max", type=int, default=14)
    p.add_argument("--seed", type=int)
    p.add_argument("--svg")

    for name, func, help_ in (("mcmc", _cmd_mcmc, "run a chain driven by a driver sequence"),
                              ("pushback", _cmd_pushback, "push-back discrepancy of a chain")):
        p = add(name, func, help_)
        p.add_argument("--chain", choices=["shift", "metropolis"], default="shift")
        p.add_argument("--driver", choices=["lcg", "vdc", "random"], default="lcg")
        p.add_argument("--density", choices=sorted(arsampler.DENSITIES), default="quad",
                       help="Metropolis target")
        p.add_argument("--x0", type=float)
        p.add_argument("--seed", type=int)
    sub.choices["mcmc"].add_argument("--n", type=int, required=True)
    pb = sub.choices["pushback"]
    pb.add_argument("--N", type=int, required=True)
    pb.add_argument("--M", type=int, default=10_000)
    pb.add_argument("--family", choices=["anchored", "interval"], default="anchored")
    pb.add_argument("--resolution", type=int, default=8)

    p = add("ratefit", _cmd_ratefit, "log-log slope of a CSV column against another")
    p.add_argument("csv")
    p.add_argument("--x", default="N")
    p.add_argument("--y", required=True)
    p.add_argument("--drop-first", type=int, default=0)

    p = add("run", _cmd_run, "run an experiment from a key = value config file")
    p.add_argument("config")
    p.add_argument("--svg")
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ValueError, ConfigError, OSError, cudmcmc.StateSpaceError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"geodisc: error: {msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
