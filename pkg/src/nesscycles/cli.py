"""``nesscycles`` command-line interface.

Exit codes: 0 ok, 2 parse error, 3 validation error, 4 resource cap,
5 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .cycles import Cycle, cycle_counts, enumerate_cycles
from .decomposition import (
    DEFAULT_MAX_ORDERINGS,
    db_current_split,
    decompose,
    enumerate_decompositions,
    sample_decompositions,
)
from .errors import NessError
from .io import ParseError, flux_to_json, fmt, load_model, model_to_json, sweep_csv, thermo_csv
from .markov import (
    is_detailed_balanced,
    is_dynamically_reversible,
    require_valid,
    stationary_distribution,
    steady_fluxes,
)
from .observables import entropy_production, thermo_quantities
from .simulator import empirical_fluxes, project_kirchhoff, simulate
from .tasep import NAMED_CYCLES, build_tasep, kink_slopes, tasep_sweep
from .transform import build_cycle_graph, cycle_potential, normalization


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    return int(os.environ.get("NESS_THREADS", "1"))


def _report(args, digest=None, seed=None, results=None):
    return {
        "command": ["nesscycles"] + args.argv,
        "input_sha256": digest,
        "version": __version__,
        "seed": seed,
        "results": results or {},
    }


def _emit(args, report, text):
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(text.rstrip("\n"))


def _write(path, payload):
    with open(path, "w") as fh:
        if isinstance(payload, str):
            fh.write(payload)
        else:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def _load(args):
    p, digest = load_model(args.model)
    require_valid(p)
    return p, digest


def _combination(d) -> str:
    terms = [f"{fmt(w)}·({c.label()})" for c, w in zip(d.catalog, d.weights) if w > 0]
    return " + ".join(terms) if terms else "0"


def _decomposition_text(d, title) -> str:
    lines = [title, f"  {'cycle':<24}{'weight':>20}"]
    for c, w in zip(d.catalog, d.weights):
        lines.append(f"  {c.label():<24}{fmt(w):>20}")
    lines.append(f"  = {_combination(d)}")
    return "\n".join(lines)


def cmd_steady(args):
    p, digest = _load(args)
    pi = stationary_distribution(p)
    f = steady_fluxes(p)
    db, worst = is_detailed_balanced(p)
    rev = is_dynamically_reversible(p)
    results = {
        "p": [float(v) for v in pi],
        "fluxes": flux_to_json(f)["fluxes"],
        "detailed_balance": db,
        "max_abs_current": worst,
        "dynamically_reversible": rev,
    }
    lines = [f"{'state':>6}{'p*':>22}"]
    lines += [f"{i + 1:>6}{fmt(v):>22}" for i, v in enumerate(pi)]
    lines.append("")
    lines.append(f"{'edge':>8}{'flux':>22}")
    for i, j, v in results["fluxes"]:
        lines.append(f"{f'{i}->{j}':>8}{fmt(v):>22}")
    lines.append("")
    lines.append(f"detailed balance: {'yes' if db else 'no'} (max |I| = {fmt(worst)})")
    lines.append(f"dynamically reversible: {'yes' if rev else 'no'}")
    _emit(args, _report(args, digest, results=results), "\n".join(lines))
    return 0


def _read_ordering(path, catalog):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"ordering file: malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        listed = [catalog.index(Cycle(tuple(v - 1 for v in vs))) for vs in data]
    except ValueError as exc:
        raise ParseError(f"ordering file names a cycle not in the catalog: {exc}") from exc
    rest = [k for k in range(len(catalog)) if k not in listed]
    return listed + rest


def cmd_decompose(args):
    p, digest = _load(args)
    f = steady_fluxes(p)
    catalog = enumerate_cycles(p)
    counts = cycle_counts(p)
    header = f"cycles M={counts.M}  Betti M_B={counts.M_B}  SNT M_SNT={counts.M_SNT}"
    results = {"M": counts.M, "M_B": counts.M_B, "M_SNT": counts.M_SNT,
               "catalog": catalog.to_json()}
    if args.split_2cycles:
        split = db_current_split(f, catalog)
        results["two_cycle_part"] = split.two_cycle_part.to_json()
        results["current_part"] = split.current_part.to_json()
        text = "\n".join([
            header,
            _decomposition_text(split.two_cycle_part, "detailed-balance part (2-cycles)"),
            _decomposition_text(split.current_part, "current part"),
        ])
        payload = {"two_cycle_part": results["two_cycle_part"],
                   "current_part": results["current_part"]}
    elif args.ordering == "all":
        if args.sample:
            sampled = sample_decompositions(f, catalog, args.sample, args.seed, _threads(args))
            found = sampled.decompositions
            summary = (f"at least {len(found)} distinct decompositions "
                       f"({args.sample} random orderings, seed {args.seed}; lower bound)")
        else:
            found = enumerate_decompositions(f, catalog, args.max_orderings, _threads(args))
            summary = f"{len(found)} distinct decompositions"
        results["distinct"] = len(found)
        results["decompositions"] = [d.to_json() for d in found]
        blocks = [header, summary]
        blocks += [_decomposition_text(d, f"decomposition {k + 1}") for k, d in enumerate(found)]
        text = "\n".join(blocks)
        payload = results["decompositions"]
    else:
        order = None if args.ordering == "default" else _read_ordering(args.ordering, catalog)
        d = decompose(f, catalog, order)
        results["decomposition"] = d.to_json()
        text = "\n".join([header, _decomposition_text(d, "decomposition")])
        payload = results["decomposition"]
    if args.out:
        _write(args.out, payload)
    _emit(args, _report(args, digest, results=results), text)
    return 0


def cmd_transform(args):
    p, digest = _load(args)
    f = steady_fluxes(p)
    catalog = enumerate_cycles(p)
    order = None if args.ordering == "default" else _read_ordering(args.ordering, catalog)
    d = decompose(f, catalog, order)
    g = build_cycle_graph(d, p)
    pot = cycle_potential(g)
    export = g.to_json()
    export["Z"] = pot.Z
    export["sum_m_tau"] = normalization(g)
    lines = [f"{'cycle':<20}{'m':>20}{'tau':>20}{'H':>20}"]
    for node in export["nodes"]:
        label = "→".join(map(str, node["cycle"]))
        lines.append(f"{label:<20}{fmt(node['m']):>20}{fmt(node['tau']):>20}{fmt(node['H']):>20}")
    lines.append("")
    lines.append(f"{'a':<14}{'b':<14}{'b_ab':>20}{'b_ba':>20}{'psi':>20}")
    for e in export["edges"]:
        a = "→".join(map(str, e["a"]))
        b = "→".join(map(str, e["b"]))
        lines.append(f"{a:<14}{b:<14}{fmt(e['b_ab']):>20}{fmt(e['b_ba']):>20}{fmt(e['psi']):>20}")
    lines.append("")
    lines.append(f"Z = {fmt(pot.Z)}, sum m*tau = {fmt(export['sum_m_tau'])}")
    if args.out:
        _write(args.out, export)
    _emit(args, _report(args, digest, results=export), "\n".join(lines))
    return 0


def cmd_thermo(args):
    p, digest = _load(args)
    t = thermo_quantities(p)
    table = thermo_csv(t)
    if args.out:
        _write(args.out, table)
    try:
        ep = entropy_production(p)
    except NessError as exc:
        print(table.rstrip("\n"))
        print(f"entropy production refused: {exc}", file=sys.stderr)
        return exc.exit_code
    results = {"P_tot": ep.P_tot, "P_sys": ep.P_sys, "P_med": ep.P_med, "edges_csv": table}
    text = table + f"P_tot = {fmt(ep.P_tot)}\nP_sys = {fmt(ep.P_sys)}\nP_med = {fmt(ep.P_med)}\n"
    _emit(args, _report(args, digest, results=results), text)
    return 0


def cmd_simulate(args):
    p, digest = _load(args)
    traj = simulate(p, n_events=args.events, t_max=args.t_max, seed=args.seed,
                    start=args.start - 1)
    if args.out:
        traj.write_csv(args.out)
    occ = traj.occupation()
    f = empirical_fluxes(traj)
    results = {
        "n_events": len(traj),
        "total_time": traj.total_time,
        "occupation": occ.tolist(),
        "empirical_fluxes": flux_to_json(f),
    }
    lines = [f"{len(traj)} events, total time {fmt(traj.total_time)}",
             f"{'state':>6}{'occupation':>22}"]
    lines += [f"{i + 1:>6}{fmt(v):>22}" for i, v in enumerate(occ)]
    if args.decompose:
        projected = project_kirchhoff(f)
        d = decompose(projected, enumerate_cycles(p))
        results["decomposition"] = d.to_json()
        results["decomposition"]["note"] = "empirical fluxes projected onto Kirchhoff-balanced fields (least squares)"
        lines.append(_decomposition_text(d, "decomposition of projected empirical fluxes"))
    if args.flux_out:
        _write(args.flux_out, flux_to_json(f))
    _emit(args, _report(args, digest, seed=args.seed, results=results), "\n".join(lines))
    return 0


def cmd_tasep_sweep(args):
    pin = NAMED_CYCLES.get(args.pin)
    if pin is None:
        pin = Cycle(tuple(int(v) - 1 for v in args.pin.replace("→", ",").split(",")))
    if args.log:
        xs = np.geomspace(args.x_min, args.x_max, args.points)
    else:
        xs = np.linspace(args.x_min, args.x_max, args.points)
    rows = tasep_sweep(xs, pin)
    table = sweep_csv(rows)
    kink = kink_slopes(pin)
    if args.out:
        _write(args.out, table)
    results = {"csv": table, "kink": {"x": kink.x0, "left_slope": kink.left_slope,
                                      "right_slope": kink.right_slope,
                                      "discontinuity": kink.discontinuity}}
    text = table + (f"kink at x=1: left slope {fmt(kink.left_slope)}, right slope "
                    f"{fmt(kink.right_slope)}, jump {fmt(kink.discontinuity)}\n")
    _emit(args, _report(args, results=results), text)
    return 0


def cmd_tasep_model(args):
    data = model_to_json(build_tasep(args.x))
    if args.out:
        _write(args.out, data)
    else:
        print(json.dumps(data, indent=2))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="nesscycles", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, model=True):
        sp = sub.add_parser(name, help=help)
        if model:
            sp.add_argument("model", help="model JSON file")
        sp.add_argument("--json", action="store_true", help="print the run report as JSON")
        sp.set_defaults(func=func)
        return sp

    add("steady", cmd_steady, "steady state, fluxes and balance flags")

    sp = add("decompose", cmd_decompose, "cycle decomposition of the steady-state fluxes")
    sp.add_argument("--ordering", default="default",
                    help="'default', 'all', or a JSON file listing cycles to visit first")
    sp.add_argument("--split-2cycles", action="store_true", help="visit all 2-cycles first")
    sp.add_argument("--max-orderings", type=int, default=DEFAULT_MAX_ORDERINGS)
    sp.add_argument("--sample", type=int, default=0,
                    help="with --ordering all: sample this many random orderings instead")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--out", help="write decomposition JSON here")

    sp = add("transform", cmd_transform, "cycle graph, exchange rates and cycle potential")
    sp.add_argument("--ordering", default="default")
    sp.add_argument("--out")

    sp = add("thermo", cmd_thermo, "currents, affinities and entropy production")
    sp.add_argument("--out", help="write the edge table CSV here")

    sp = add("simulate", cmd_simulate, "kinetic Monte Carlo trajectory")
    sp.add_argument("--seed", type=int, required=True)
    stop = sp.add_mutually_exclusive_group(required=True)
    stop.add_argument("--events", type=int)
    stop.add_argument("--t-max", type=float)
    sp.add_argument("--start", type=int, default=1, help="initial state (1-based)")
    sp.add_argument("--out", help="trajectory CSV")
    sp.add_argument("--flux-out", help="empirical flux JSON")
    sp.add_argument("--decompose", action="store_true")

    sp = add("tasep-sweep", cmd_tasep_sweep, "decomposition weights of the TASEP across x", model=False)
    sp.add_argument("--x-min", type=float, default=0.1)
    sp.add_argument("--x-max", type=float, default=10.0)
    sp.add_argument("--points", type=int, default=100)
    sp.add_argument("--log", action="store_true", help="log-spaced x values")
    sp.add_argument("--pin", default="alpha", help="cycle visited first: alpha..delta or e.g. 1,3,6,4")
    sp.add_argument("--out")

    sp = add("tasep-model", cmd_tasep_model, "write the TASEP model file", model=False)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--out")
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except NessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for v in getattr(exc, "violations", []):
            print(f"  - {v}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
