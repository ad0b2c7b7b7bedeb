"""``maxgraph`` command line.

Exit status: 0 on success, 1 when a verification step fails, 2 on usage
errors (bad flags, unparseable literals, vertices outside the family).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from ..core_graph import GraphError, ResourceLimit, ball
from .._engine import engine_for
from ..families import build, closed_form_ball_size, parse_family
from ..indices import (
    BallFamily, HeuristicInconclusive, Window, dilation_lb, doubling_K_lb, ecp_lb,
    finite_overlap_index, max_degree_lb, overlap_certificate, parse_ball_family,
)
from ..maximal import hl_maximal_at, parse_function, parse_vertex, weak_norm
from ..spherical import (
    expander_lb, lemma42_check, load_sequence, sphere_ids, spherical_maximal_at, thm41_rhs,
)
from .config import RunConfig, threads_from_env
from .report import as_text, curve_csv, dumps, envelope
from .suites import ALIASES, SUITES, Context, resolve, run_suite
from .table1 import table1_report

MAX_LISTED = 10_000


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    if q <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return q


def _seed(text: str) -> int:
    try:
        s = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return s


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--max-members", type=int, default=None,
                        help="cap on vertices visited by one enumeration")

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--family", required=True,
                     help='e.g. "tree:k=3", "comb", "oplusK", "edgelist:path=FILE"')

    p = _Parser(prog="maxgraph", description="Metric invariants and maximal operators on graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ball", parents=[common, fam], help="ball B(x, r)")
    s.add_argument("--center", required=True)
    s.add_argument("--radius", type=int, required=True)

    s = sub.add_parser("sphere", parents=[common, fam], help="sphere S(x, r)")
    s.add_argument("--center", required=True)
    s.add_argument("--radius", type=int, required=True)

    s = sub.add_parser("maximal", parents=[common, fam], help="M f(x) and the spherical M f(x)")
    s.add_argument("--fn", required=True, help='"delta@(j,k)" or a file of "vertex value" lines')
    s.add_argument("--at", action="append", help="vertex (repeatable); default: the support")

    s = sub.add_parser("weak-norm", parents=[common, fam], help="sup of lam |{M f > lam}|")
    s.add_argument("--fn", required=True)
    s.add_argument("--lambda-floor", type=_rational, default=None)

    s = sub.add_parser("indices", parents=[common, fam], help="D_k, K, ECP and degree on a window")
    s.add_argument("--window-radius", type=int, default=None)
    s.add_argument("--r-max", type=int, default=None)
    s.add_argument("--k", type=int, action="append", help="dilation factor (repeatable)")
    s.add_argument("--base", default=None)
    s.add_argument("--no-ecp", action="store_true", help="skip the quadratic ECP scan")

    s = sub.add_parser("overlap", parents=[common, fam], help="overlap of a ball family")
    s.add_argument("--balls", help='"((3,1),2);((4,0),1)"; finite graphs may omit it')

    s = sub.add_parser("expander", parents=[common, fam], help="lower bound for E_G(r)")
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--window-radius", type=int, default=2)
    s.add_argument("--max-size", type=int, default=3)
    s.add_argument("--mode", choices=("exhaustive", "stochastic"), default="exhaustive")
    s.add_argument("--restarts", type=int, default=64)
    s.add_argument("--base", default=None)

    s = sub.add_parser("thm41", parents=[common], help="the sphere/expander bound functional")
    s.add_argument("--sequence", required=True, help="file: tail header, then 'r S E' lines")
    s.add_argument("--n-max", type=int, default=32)

    s = sub.add_parser("lemma42", parents=[common, fam], help="step-by-step lemma check")
    s.add_argument("--fn", required=True)
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--window-radius", type=int, default=None)
    s.add_argument("--lam", type=_rational, default=Fraction(1))

    s = sub.add_parser("table1", parents=[common], help="the five-family property matrix")
    s.add_argument("--threads", type=int, default=None)

    s = sub.add_parser("verify", parents=[common], help="run one verification suite")
    s.add_argument("prop_id", nargs="?", help="suite id; see --list")
    s.add_argument("--list", action="store_true")
    return p


# -- helpers ----------------------------------------------------------------


def _graph(args):
    try:
        return build(parse_family(args.family))
    except (GraphError, OSError, ValueError) as exc:
        raise UsageError("--family", str(exc)) from None


def _vertex(G, text: str, flag: str):
    try:
        v = parse_vertex(text)
        return G.check(G.coerce(v[0]) if len(v) == 1 else v)
    except (GraphError, ValueError) as exc:
        raise UsageError(flag, str(exc)) from None


def _function(G, text: str):
    try:
        return parse_function(text, G)
    except (GraphError, ValueError) as exc:
        raise UsageError("--fn", str(exc)) from None


def _threads() -> int:
    try:
        return threads_from_env()
    except ValueError as exc:
        raise UsageError("MAXGRAPH_THREADS", str(exc)) from None


def _config(args) -> RunConfig:
    spec = parse_family(args.family) if getattr(args, "family", None) else None
    over = {"seed": args.seed, "output_format": args.format, "threads": _threads()}
    for name in ("window_radius", "r_max"):
        if getattr(args, name, None) is not None:
            over[name] = getattr(args, name)
    if getattr(args, "lambda_floor", None) is not None:
        over["lambda_floor"] = args.lambda_floor
    if args.max_members is not None:
        over["max_members"] = args.max_members
    try:
        return RunConfig.for_family(spec, **over)
    except ValueError as exc:
        raise UsageError("--window-radius, --r-max or --max-members", str(exc)) from None


def _members(members):
    return list(members) if len(members) <= MAX_LISTED else None


# -- commands -----------------------------------------------------------------


def cmd_ball(args):
    G = _graph(args)
    x = _vertex(G, args.center, "--center")
    if args.radius < 0:
        raise UsageError("--radius", "must be nonnegative")
    cfg = _config(args)
    b = ball(G, x, args.radius, max_members=cfg.max_members)
    try:
        cf = closed_form_ball_size(parse_family(args.family), x, args.radius)
    except GraphError:
        cf = None
    res = {"center": x, "radius": args.radius, "size": b.size, "layer_sizes": b.layer_sizes,
           "members": _members(b.members), "closed_form": cf}
    return cfg, res, "ok", None


def cmd_sphere(args):
    G = _graph(args)
    x = _vertex(G, args.center, "--center")
    if args.radius < 0:
        raise UsageError("--radius", "must be nonnegative")
    eng = engine_for(G)
    ids = sphere_ids(G, x, args.radius)
    members = sorted(eng.key(u) for u in ids)
    return _config(args), {"center": x, "radius": args.radius, "size": len(members),
                           "members": _members(members)}, "ok", None


def cmd_maximal(args):
    G = _graph(args)
    f = _function(G, args.fn)
    at = [_vertex(G, a, "--at") for a in args.at] if args.at else f.support
    rows = [{"x": x, "hl": hl_maximal_at(G, f, x), "spherical": spherical_maximal_at(G, f, x)}
            for x in at]
    return _config(args), {"fn_mass": f.total_mass, "values": rows}, "ok", None


def cmd_weak_norm(args):
    G = _graph(args)
    f = _function(G, args.fn)
    cfg = _config(args)
    floor = args.lambda_floor if args.lambda_floor is not None else min(cfg.lambda_floor, f.total_mass)
    if floor > f.total_mass:
        raise UsageError("--lambda-floor", "must not exceed ||f||_1")
    est = weak_norm(G, f, floor, cfg.max_members)
    res = {"lower_bound": est.lower_bound, "attained_at_lambda": est.attained_at_lambda,
           "lambda_floor": est.lambda_floor, "divergence_exponent": est.divergence_exponent,
           "fit_residual": est.fit_residual, "verdict": est.verdict, "exact": est.exact,
           "curve": est.curve}
    return cfg.with_(lambda_floor=floor), res, "ok", est.counts


def cmd_indices(args):
    G = _graph(args)
    cfg = _config(args)
    base = _vertex(G, args.base, "--base") if args.base else None
    W = Window.around(G, cfg.window_radius, base)
    ks = args.k or [2]
    if any(k < 2 for k in ks):
        raise UsageError("--k", "dilation factors must be at least 2")
    res = {"window_size": len(W)}
    for k in ks:
        res[f"D{k}"] = dilation_lb(G, k, W, cfg.r_max).summary()
    res["K"] = doubling_K_lb(G, W, cfg.r_max).summary()
    res["MaxDegree"] = max_degree_lb(G, W).summary()
    if not args.no_ecp and len(W) >= 2:
        res["ECP"] = ecp_lb(G, W).summary()
    return cfg, res, "ok", None


def cmd_overlap(args):
    G = _graph(args)
    cfg = _config(args)
    if not args.balls:
        if not G.is_finite:
            raise UsageError("--balls", "required for infinite families")
        O, witness = finite_overlap_index(G)
        return cfg, {"overlap_index": O, "witness_family": witness}, "ok", None
    try:
        balls = [(_vertex(G, "(" + ",".join(map(str, c)) + ")", "--balls"), r)
                 for c, r in parse_ball_family(args.balls)]
    except ValueError as exc:
        raise UsageError("--balls", str(exc)) from None
    cert = overlap_certificate(G, BallFamily.of(G, balls))
    res = {"balls": cert.family.balls, "min_overlap": cert.min_overlap,
           "minimizing_subfamily": cert.minimizing_subfamily,
           "private_points": cert.private_points, "exact": cert.exact}
    return cfg, res, "ok", None


def cmd_expander(args):
    G = _graph(args)
    cfg = _config(args)
    base = _vertex(G, args.base, "--base") if args.base else None
    if args.max_size < 1:
        raise UsageError("--max-size", "must be at least 1")
    W = Window.around(G, args.window_radius, base)
    est = expander_lb(G, args.radius, W, args.max_size, args.mode, args.seed, args.restarts)
    res = {"r": est.r, "q_value": est.q_value, "witness_A": est.witness_A,
           "witness_B": est.witness_B, "mode": est.mode, "seed": est.seed,
           "search_value": est.search_value, "canonical_value": est.canonical_value,
           "window_radius": args.window_radius, "window_size": len(W), "max_size": args.max_size}
    return cfg, res, "ok", None


def cmd_thm41(args):
    try:
        seq = load_sequence(args.sequence)
    except (GraphError, OSError) as exc:
        raise UsageError("--sequence", str(exc)) from None
    out = thm41_rhs(seq, args.n_max)
    cfg = RunConfig(seed=args.seed, output_format=args.format)
    res = {"value": out.value, "argmax_n": out.argmax_n, "per_n": out.per_n,
           "lower_bound_of_bound": out.truncated, "tail": seq.tail, "ratio": seq.ratio,
           "growth": seq.growth, "r_max": seq.r_max, "provenance": Path(seq.provenance).name}
    return cfg, res, "ok", None


def cmd_lemma42(args):
    G = _graph(args)
    f = _function(G, args.fn)
    cfg = _config(args)
    if args.radius < 1:
        raise UsageError("--radius", "must be positive")
    W = Window.around(G, cfg.window_radius)
    rep = lemma42_check(G, f, args.radius, W, args.lam)
    steps = [{"name": s.name, "status": "PASS" if s.passed else "FAIL", "detail": s.detail}
             for s in rep.steps]
    res = {"r": rep.r, "S": rep.S, "n_r": rep.n_r, "E": rep.E, "F": rep.F}
    return cfg, (res, steps), "ok" if rep.passed else "FAILURE", None


def cmd_table1(args):
    if args.threads is not None and args.threads < 1:
        raise UsageError("--threads", "must be positive")
    threads = args.threads or _threads()
    rep = table1_report(Context(seed=args.seed), threads)
    body = rep.as_dict()
    bad = rep.failures or any(i["status"] == "FAILURE" for i in body["implications"])
    cfg = RunConfig(seed=args.seed, output_format=args.format)
    return cfg, body, "FAILURE" if bad else "ok", None


def cmd_verify(args):
    if args.list or not args.prop_id:
        ids = sorted(SUITES) + sorted(ALIASES)
        if not args.list:
            raise UsageError("prop_id", "missing; known ids: " + ", ".join(ids))
        listing = {sid: SUITES[sid].claim for sid in sorted(SUITES)}
        listing.update({a: f"alias of {t}" for a, t in ALIASES.items()})
        return RunConfig(seed=args.seed), {"suites": listing}, "ok", None
    try:
        sid = resolve(args.prop_id)
    except KeyError:
        raise UsageError("prop_id", f"unknown suite {args.prop_id!r}; try --list") from None
    rep = run_suite(sid, Context(seed=args.seed))
    d = rep.as_dict()
    steps = d.pop("steps")
    cfg = RunConfig(seed=args.seed, output_format=args.format)
    return cfg, (d | {"requested": args.prop_id}, steps), \
        "FAILURE" if rep.failed else "ok", None


COMMANDS = {
    "ball": cmd_ball, "sphere": cmd_sphere, "maximal": cmd_maximal, "weak-norm": cmd_weak_norm,
    "indices": cmd_indices, "overlap": cmd_overlap, "expander": cmd_expander, "thm41": cmd_thm41,
    "lemma42": cmd_lemma42, "table1": cmd_table1, "verify": cmd_verify,
}


def _emit(args, cfg: RunConfig, result, status, counts) -> str:
    steps = None
    if isinstance(result, tuple):
        result, steps = result
    if args.format == "csv":
        if counts is None:
            raise UsageError("--format", "csv output is only available for weak-norm")
        return curve_csv(counts)
    rep = envelope(args.command, cfg.describe(), result, status, steps)
    return as_text(rep) if args.format == "text" else dumps(rep)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, result, status, counts = COMMANDS[args.command](args)
        text = _emit(args, cfg, result, status, counts)
    except UsageError as exc:
        print(f"maxgraph {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ResourceLimit, HeuristicInconclusive) as exc:
        print(f"maxgraph {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except GraphError as exc:
        print(f"maxgraph {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 1 if status == "FAILURE" else 0


if __name__ == "__main__":
    sys.exit(main())
