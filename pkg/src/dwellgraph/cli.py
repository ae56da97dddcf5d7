"""Command-line front end.

Exit codes: 0 certificate produced, 2 invalid input, 3 some subsystem is
not Schur stable, 4 numerical breakdown.
"""

import argparse
import json
import sys

import numpy as np

from . import catalog
from .dwell import analyze, jordan_forms, nondefective_forms
from .errors import (ChainFailure, Defective, DimensionMismatch, DwellGraphError,
                     EpsilonSearchFailed, NotSchurStable, SignalNotAdmissible, Singular,
                     SpecError, UnknownExample, ValidationError)
from .graph import basis_gamma, build_graph
from .numerics import spectral_radius
from .simulation import AVG_DWELL, MIN_DWELL, empirical_decay
from .specfile import (SystemSpec, build_report, load_spec, render_report, render_spec,
                       spec_hash)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNSTABLE = 3
EXIT_NUMERIC = 4


def _check_stable(spec):
    for k, (name, A) in enumerate(zip(spec.names, spec.matrices)):
        rho = spectral_radius(A)
        if rho >= 1.0:
            raise NotSchurStable(f"subsystem {name!r} (#{k + 1}) has spectral radius "
                                 f"{rho:.12g} >= 1", index=k, name=name, spectral_radius=rho)


def cmd_analyze(spec, mode="all", eps=None, eps_search=False, norm=None, tol=None):
    """Analysis report (a dict, see :func:`dwellgraph.specfile.build_report`)."""
    _check_stable(spec)
    opts = spec.options
    eps = opts["epsilon"] if eps is None else eps
    tol = opts["tol"] if tol is None else tol
    norm = opts["norm"] if norm is None else norm
    result = analyze(spec.matrices, spec.adjacency_graph(), mode=mode, eps=eps,
                     eps_search=eps_search, norm=norm, tol=tol)
    flags = {"mode": mode, "epsilon": eps, "eps_search": eps_search, "norm": norm, "tol": tol}
    report = build_report(spec, result, flags)
    report["gamma"] = basis_gamma(result["forms"])
    return report


def _forms(matrices, eps, tol):
    try:
        return nondefective_forms(matrices, tol)
    except Defective:
        return jordan_forms(matrices, eps, tol)


def cmd_simulate(spec, tau, mode="min", n0=0, trials=100, horizon=None, seed=0,
                 adversarial=False):
    """Monte-Carlo summary with the seed and trial count embedded."""
    if isinstance(tau, bool) or int(tau) != tau or tau < 1:
        raise ValidationError("tau must be a positive integer", field="tau")
    if trials < 1:
        raise ValidationError("trials must be at least 1", field="trials")
    if horizon is not None and horizon < 1:
        raise ValidationError("horizon must be at least 1", field="horizon")
    if mode not in ("min", "avg"):
        raise ValidationError("mode must be 'min' or 'avg'", field="mode")
    if n0 < 0:
        raise ValidationError("n0 must be non-negative", field="n0")
    tau = int(tau)
    _check_stable(spec)
    adj = spec.adjacency_graph()
    forms = _forms(spec.matrices, spec.options["epsilon"], spec.options["tol"])
    cycle = None
    if adversarial:
        if mode != "min":
            raise ValidationError("--adversarial needs --mode min", field="adversarial")
        from .cycles import max_cycle_ratio
        cert = max_cycle_ratio(build_graph(forms, adj), spec.options["tol"])
        if cert is None:
            raise ValidationError("graph is acyclic; no cycle to dwell on", field="adversarial")
        cycle = cert.cycle
    sim_mode = MIN_DWELL if mode == "min" else AVG_DWELL
    stats = empirical_decay(spec.matrices, adj, tau, trials=trials, horizon=horizon,
                            seed=seed, mode=sim_mode, n0=n0,
                            forms=forms if mode == "min" else None,
                            adversarial_cycle=cycle)
    return {
        "input_sha256": spec_hash(spec),
        "flags": {"tau": tau, "mode": mode, "n0": n0, "trials": trials,
                  "horizon": 100 * tau if horizon is None else horizon, "seed": seed,
                  "adversarial": adversarial},
        "critical_cycle": None if cycle is None else [v + 1 for v in cycle],
        "stats": stats.to_dict(),
        "all_decay": bool(stats.max_ratio < 1e-6),
    }


def cmd_generate_example(name, adjacency=None):
    """System file for a named reference example."""
    matrices, adjs = catalog.get_example(name)
    keyword = {"G1": "full", "G2": "ring", "G3": "ring2", "full": "full"}
    labels = list(adjs)
    if adjacency is None:
        adjacency = labels[0]
    if adjacency not in adjs:
        raise ValidationError(f"{name} has graphs {labels}", field="graph")
    names = [f"A{k + 1}" for k in range(len(matrices))]
    return SystemSpec(matrices[0].shape[0], names, [np.array(A) for A in matrices],
                      keyword[adjacency])


def cmd_graph(spec, eps=None, tol=None):
    """Weighted edges ``(from, to, w_plus, w_minus)``, 1-based."""
    eps = spec.options["epsilon"] if eps is None else eps
    tol = spec.options["tol"] if tol is None else tol
    _check_stable(spec)
    g = build_graph(_forms(spec.matrices, eps, tol), spec.adjacency_graph())
    return [(e.i + 1, e.j + 1, e.w_plus, e.w_minus) for e in g.edges]


def _parser():
    p = argparse.ArgumentParser(prog="dwellgraph",
                                description="Dwell-time certificates for graph-constrained "
                                            "discrete-time switched linear systems.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="compute minimum and average dwell bounds")
    a.add_argument("spec")
    m = a.add_mutually_exclusive_group()
    m.add_argument("--min", dest="mode", action="store_const", const="min")
    m.add_argument("--avg", dest="mode", action="store_const", const="avg")
    m.add_argument("--all", dest="mode", action="store_const", const="all")
    e = a.add_mutually_exclusive_group()
    e.add_argument("--eps", type=float)
    e.add_argument("--eps-search", action="store_true")
    a.add_argument("--norm", choices=["spectral", "1", "inf"])
    a.add_argument("--tol", type=float)
    a.add_argument("--format", choices=["json", "flat"], default="json")
    a.set_defaults(mode="all")

    s = sub.add_parser("simulate", help="Monte-Carlo check of a dwell time")
    s.add_argument("spec")
    s.add_argument("--tau", type=int, required=True)
    s.add_argument("--mode", choices=["min", "avg"], default="min")
    s.add_argument("--n0", type=int, default=0)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--horizon", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--adversarial", action="store_true",
                   help="dwell exactly tau on the critical cycle")

    g = sub.add_parser("generate-example", help="write a reference system file")
    g.add_argument("name")
    g.add_argument("--graph", help="adjacency preset (example1: G1, G2, G3)")

    w = sub.add_parser("graph", help="dump the weighted switching graph")
    w.add_argument("spec")
    w.add_argument("--eps", type=float)
    return p


def _fail(code, err):
    print(f"error: {err}", file=sys.stderr)
    return code


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = _parser().parse_args(argv)
    try:
        if args.command == "generate-example":
            out.write(render_spec(cmd_generate_example(args.name, args.graph)))
            return EXIT_OK
        spec = load_spec(args.spec)
        if args.command == "analyze":
            if args.eps is not None and not args.eps > 0:
                raise ValidationError("eps must be positive", field="eps")
            if args.tol is not None and not args.tol > 0:
                raise ValidationError("tol must be positive", field="tol")
            report = cmd_analyze(spec, args.mode, args.eps, args.eps_search, args.norm,
                                 args.tol)
            out.write(render_report(report, args.format))
        elif args.command == "simulate":
            result = cmd_simulate(spec, args.tau, args.mode, args.n0, args.trials,
                                  args.horizon, args.seed, args.adversarial)
            out.write(json.dumps(result, indent=2) + "\n")
        elif args.command == "graph":
            out.write("from\tto\tw_plus\tw_minus\n")
            for i, j, wp, wm in cmd_graph(spec, args.eps):
                out.write(f"{i}\t{j}\t{wp:.12g}\t{wm:.12g}\n")
    except NotSchurStable as err:
        return _fail(EXIT_UNSTABLE, err)
    except (SpecError, UnknownExample, DimensionMismatch, SignalNotAdmissible,
            OSError) as err:
        return _fail(EXIT_INVALID, err)
    except (ChainFailure, Singular, EpsilonSearchFailed, DwellGraphError,
            np.linalg.LinAlgError) as err:
        # non-positive losses, invalid Jordan factors and the like end up here
        return _fail(EXIT_NUMERIC, err)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
