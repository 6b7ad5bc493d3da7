"""Command-line front end: ``analyze``, ``check-mg`` and ``verify``.

Every command prints one JSON report.  Rationals travel as
``[numerator, denominator]`` pairs; only measured quantities are floats.
Exit codes: 0 success, 2 parse error, 3 internal inconsistency,
4 certified violation of the nondegeneracy condition, 5 measurement
refused or unsupported.
"""
import argparse
import datetime
import json
import sys
from dataclasses import replace

import numpy as np
import scipy

from . import __version__, asym, empirics, geom, mgcheck
from .errors import ConsistencyError, EmpiricsError, PreconditionError
from .polyparse import ParseError, parse_map

SCHEMA_VERSION = 1

EXIT_OK, EXIT_PARSE, EXIT_CONSISTENCY, EXIT_MG, EXIT_EMPIRICS = 0, 2, 3, 4, 5

PRESETS = {
    "paper-examples": [
        ("x1^2 + x2^2", 2),
        ("x1^6 + x2^4", 2),
        ("x1*x2", 2),
        ("x1^2 - x2^2", 2),
        ("x1^2*x2; x1*x2^2", 2),
    ],
}


def _q(x):
    return [x.numerator, x.denominator]


def _input_block(text, f):
    return {"text": text, "map": str(f), "n": f.n, "m": f.m}


def analyze_map(f, args):
    G = geom.newton_polytope(f)
    Gt = geom.downward_closure(G)
    profile = asym.analyze(f)
    routes = asym.lp_cross_check(f)
    # the exponents do not depend on the condition, but they only describe growth when it holds
    verdicts = mgcheck.check_mg(f, mgcheck.SearchBudget(seed=args.seed, workers=args.threads))
    return {
        "mg": {"satisfied": mgcheck.satisfies_mg(verdicts), "worst_status": verdicts[0].status.value},
        "newton": {"polytope": G.to_json(), "downward_closure": Gt.to_json()},
        "profile": profile.to_json(),
        "faces_equal": asym.compare_profiles(profile),
        "lp_cross_check": [c.to_json() for c in routes],
    }


def check_mg_map(f, args):
    budget = mgcheck.SearchBudget(starts=args.budget, seed=args.seed, workers=args.threads)
    verdicts = mgcheck.check_mg(f, budget)
    out = {
        "budget": {"starts": budget.starts, "log_radius": budget.log_radius,
                   "threshold": budget.threshold, "max_iter": budget.max_iter},
        "verdicts": [v.to_json() for v in verdicts],
        "satisfied": mgcheck.satisfies_mg(verdicts),
        "certified_violation": any(v.status == mgcheck.MGStatus.VIOLATION_CERTIFIED for v in verdicts),
    }
    if out["satisfied"]:
        out["estimate"] = mgcheck.estimate_constants(f, seed=args.seed).to_json()
        if args.perturb:
            eps = args.epsilon if args.epsilon == "auto" else float(args.epsilon)
            probe = mgcheck.perturbation_probe(f, args.perturb, eps, replace(budget, workers=1),
                                               seed=args.seed, workers=args.threads)
            out["perturbation"] = probe.to_json()
    return out


def verify_map(f, args):
    kind = empirics.Kind.LATTICE_COUNT if args.kind == "lattice" else empirics.Kind.VOLUME
    profile = asym.analyze(f)
    if kind == empirics.Kind.LATTICE_COUNT:
        finite, theta, log_exp = profile.lattice_finite, profile.theta_prime, profile.log_exp_lattice
    else:
        finite, theta, log_exp = profile.volume_finite, profile.theta, profile.log_exp_volume
    if not finite:
        raise empirics.InfiniteMeasureError(f"{args.kind} measure is infinite for this map")
    schedule = None
    if args.schedule:
        schedule = [float(x) for x in args.schedule.split(",")]
    method = empirics.Method.MONTE_CARLO if args.method == "mc" else empirics.Method.GRID
    s = empirics.sweep(f, kind, schedule, seed=args.seed, method=method, workers=args.threads)
    fixed = empirics.fit_exponents(s, kappa=log_exp)
    free = empirics.fit_exponents(s)
    return {
        "kind": args.kind,
        "predicted": {"theta": _q(theta), "log_exponent": log_exp},
        "sweep": s.to_json(),
        "fit_fixed": fixed.to_json(),
        "fit_free": free.to_json(),
    }, s


def _table(f, block):
    p, a, b = block["predicted"], block["fit_fixed"], block["fit_free"]
    theta = p["theta"][0] / p["theta"][1]
    lines = [
        f"map: {f}   kind: {block['kind']}",
        f"{'':14}{'theta':>12}{'log exp':>12}",
        f"{'predicted':14}{theta:>12.6f}{p['log_exponent']:>12}",
        f"{'fit (fixed)':14}{a['theta_hat']:>12.6f}{a['kappa_hat']:>12.3f}",
        f"{'fit (free)':14}{b['theta_hat']:>12.6f}{b['kappa_hat']:>12.3f}",
    ]
    return "\n".join(lines)


def _empirics_error(e):
    return {"type": "empirics", "message": str(e),
            "partial": getattr(e, "partial", None),
            "diagnostics": getattr(e, "diagnostics", None)}


def _maps(args):
    if args.preset:
        return [(text, parse_map(text, n)) for text, n in PRESETS[args.preset]]
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read().strip()
    elif args.f is not None:
        text = args.f
    else:
        raise ParseError("no map given (use -f, --file or --preset)", 0)
    if args.n is None:
        raise ParseError("the dimension -n is required", 0)
    return [(text, parse_map(text, args.n))]


def build_parser():
    ap = argparse.ArgumentParser(prog="sublevel", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-n", type=int, help="number of variables")
        src = p.add_mutually_exclusive_group()
        src.add_argument("-f", metavar="MAP", help="map text, components separated by ';'")
        src.add_argument("--file", help="read the map text from a file")
        src.add_argument("--preset", choices=sorted(PRESETS), help="run over a bundled corpus")
        p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
        p.add_argument("--threads", type=int, default=1, help="worker threads; never changes results")
        p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("analyze", help="exact growth exponents and their LP cross-check")
    common(p)
    p = sub.add_parser("check-mg", help="face-by-face search for common zeros of face polynomials")
    common(p)
    p.add_argument("--budget", type=int, default=8, help="quasi-random starts per face and orthant")
    p.add_argument("--perturb", type=int, default=0, metavar="TRIALS",
                   help="also run this many random coefficient perturbations")
    p.add_argument("--epsilon", default="auto", help="perturbation size, or 'auto'")
    p = sub.add_parser("verify", help="measure counts or volumes and fit the exponents")
    common(p)
    p.add_argument("--kind", choices=["lattice", "volume"], default="lattice")
    p.add_argument("--method", choices=["grid", "mc"], default="grid", help="volume estimator")
    p.add_argument("--schedule", help="comma-separated r values (default: half-decades)")
    p.add_argument("--csv", help="write the sweep as CSV (r,measurement,stderr)")
    return ap


def run(argv=None):
    """Run the CLI; returns ``(exit_code, report, parsed_args)``."""
    args = build_parser().parse_args(argv)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "seed": args.seed,
        "versions": {"sublevel": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    code = EXIT_OK
    try:
        maps = _maps(args)
        results = []
        csv_parts = []
        for text, f in maps:
            block = {"input": _input_block(text, f)}
            if args.command == "analyze":
                block.update(analyze_map(f, args))
            elif args.command == "check-mg":
                block.update(check_mg_map(f, args))
                if block["certified_violation"]:
                    code = EXIT_MG
            else:
                try:
                    body, s = verify_map(f, args)
                except EmpiricsError as e:
                    # recorded per map so a preset run still covers the rest
                    block["error"] = _empirics_error(e)
                    print(f"map: {f}   error: {e}", file=sys.stderr)
                    code = EXIT_EMPIRICS
                else:
                    block.update(body)
                    csv_parts.append(s.to_csv())
                    print(_table(f, body), file=sys.stderr)
            results.append(block)
        if args.command == "verify" and args.csv:
            with open(args.csv, "w", encoding="utf-8") as fh:
                fh.write("".join(csv_parts))
        report["results"] = results
    except ParseError as e:
        report["error"] = {"type": "parse", "message": str(e), "position": e.pos}
        code = EXIT_PARSE
    except ConsistencyError as e:
        report["error"] = {"type": "consistency", "message": str(e)}
        code = EXIT_CONSISTENCY
    except EmpiricsError as e:
        report["error"] = _empirics_error(e)
        code = EXIT_EMPIRICS
    except PreconditionError as e:
        report["error"] = {"type": "precondition", "message": str(e)}
        # outside verify a failed precondition is a bad argument, e.g. a too large epsilon
        code = EXIT_EMPIRICS if args.command == "verify" else EXIT_PARSE
    return code, report, args


def main(argv=None):
    code, report, args = run(argv)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if "error" in report:
        print(f"error: {report['error']['message']}", file=sys.stderr)
    return code
