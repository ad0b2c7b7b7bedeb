"""Verification suites: cross-module checks of the stated graph properties.

A suite is an ordered list of steps.  Each step returns PASS, FAIL or NOTE
together with its witness data; an exception inside a step is recorded as a
FAIL of that step only.  Suite ids are the public names accepted by
``maxgraph verify``.
"""

from __future__ import annotations

import math
import random
import threading
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from ..core_graph import GraphOracle, ball
from .._engine import engine_for
from ..families import (
    OplusComplete, build, check_interval_bounds, closed_form_ball_size, closed_form_degree,
    parse_family,
)
from ..indices import (
    BallFamily, Window, cover_reduce, dilation_lb, doubling_K_lb, ecp_lb, escalate,
    finite_overlap_index, floor_log_exponent, max_degree_lb, overlap_certificate,
    private_points_of, telescoping_exponent,
)
from ..maximal import (
    FinSupFn, exact_weak_norm_finite, operator_norm_lb, superlevel_count, weak_norm,
)
from ..spherical import (
    expander_lb, expander_pair_value, lemma42_check, sphere_size, sphere_sup_lb,
    spherical_maximal_at,
)
from ..maximal import hl_maximal_at
from .config import SUITE_DEFAULTS

PASS, FAIL, NOTE = "PASS", "FAIL", "NOTE"


@dataclass
class StepResult:
    name: str
    status: str
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0


@dataclass
class SuiteReport:
    id: str
    family: str
    claim: str
    steps: list

    @property
    def failed(self) -> bool:
        return any(s.status == FAIL for s in self.steps)

    @property
    def status(self) -> str:
        return "FAILURE" if self.failed else "PASS"

    def as_dict(self, timings: bool = False) -> dict:
        steps = []
        for s in self.steps:
            d = {"name": s.name, "status": s.status, "detail": s.detail}
            if timings:
                d["seconds"] = round(s.seconds, 3)
            steps.append(d)
        return {"id": self.id, "family": self.family, "claim": self.claim,
                "status": self.status, "steps": steps}


@dataclass
class Context:
    seed: int = 0
    knobs: dict = field(default_factory=lambda: dict(SUITE_DEFAULTS))

    def rng(self, tag: str) -> random.Random:
        return random.Random(f"{self.seed}:{tag}")


@dataclass
class Suite:
    id: str
    family: str
    claim: str
    steps: list = field(default_factory=list)

    def step(self, name: str):
        def deco(fn):
            self.steps.append((name, fn))
            return fn
        return deco


SUITES: dict = {}
ALIASES = {"prop-3.2-overlap": "prop-3.2-ii"}


def suite(sid: str, family: str, claim: str) -> Suite:
    s = Suite(sid, family, claim)
    SUITES[sid] = s
    return s


_graph_lock = threading.Lock()


@lru_cache(maxsize=None)
def _graph_cached(label: str) -> GraphOracle:
    return build(parse_family(label))


def graph(label: str) -> GraphOracle:
    with _graph_lock:
        return _graph_cached(label)


def resolve(prop_id: str) -> str:
    sid = ALIASES.get(prop_id, prop_id)
    if sid not in SUITES:
        raise KeyError(prop_id)
    return sid


def run_suite(prop_id: str, ctx: Context | None = None) -> SuiteReport:
    ctx = ctx or Context()
    s = SUITES[resolve(prop_id)]
    out = []
    for name, fn in s.steps:
        t0 = time.perf_counter()
        try:
            status, detail = fn(ctx)
        except Exception as exc:  # isolate the step, keep the rest
            status = FAIL
            detail = {"error": f"{type(exc).__name__}: {exc}",
                      "trace": traceback.format_exc(limit=3).splitlines()[-3:]}
        out.append(StepResult(name, status, detail, time.perf_counter() - t0))
    return SuiteReport(s.id, s.family, s.claim, out)


def run_many(ids, ctx: Context, threads: int = 1) -> list:
    """Run suites concurrently; the result list follows ``ids``."""
    ids = list(ids)
    if threads <= 1:
        return [run_suite(i, ctx) for i in ids]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda i: run_suite(i, ctx), ids))


def _ok(flag) -> str:
    return PASS if flag else FAIL


def _esc(e) -> dict:
    return {"label": e.label, "steps": e.steps, "values": e.values, "threshold": e.threshold,
            "strictly_increasing": e.strictly_increasing, "unbounded_evidence": e.unbounded_evidence}


def _full(G: GraphOracle) -> Window:
    return Window.of(G, G.vertices())


def _diameter(G: GraphOracle) -> int:
    eng = engine_for(G)
    return max(eng.profile(v, 10**6).radius for v in G.vertices())


def _dyadic_fn(rng: random.Random, pool, size: int, top: int = 4) -> FinSupFn:
    pts = rng.sample(list(pool), size)
    return FinSupFn({p: Fraction(2) ** rng.randint(-2, top) for p in pts})


def _rational_fn(rng: random.Random, pool, size: int) -> FinSupFn:
    pts = rng.sample(list(pool), min(size, len(pool)))
    return FinSupFn({p: Fraction(rng.randint(1, 9), rng.randint(1, 9)) for p in pts})


# =========================================================================
# relations between the indices
# =========================================================================

S = suite("prop-2.3", "several", "max{D_2, 1+Delta} <= K, and K <= D_2 (1+Delta) on K_n and S_n")

_CHAIN_WINDOWS = [("tree:k=3", 3, 4), ("tree:k=4", 2, 3), ("comb", 6, 6), ("dyadic", 16, 8),
                  ("oplusK", 10, 5), ("shiftK", 8, 4), ("linear:n=9", 8, 8), ("cycle:n=7", 3, 3)]


@S.step("lower_chain_matched_windows")
def _(ctx):
    rows, ok = [], True
    for label, R, rho in _CHAIN_WINDOWS:
        G = graph(label)
        W = Window.around(G, R)
        K = doubling_K_lb(G, W, rho).value
        D2 = dilation_lb(G, 2, W, rho).value
        Dl = max_degree_lb(G, W).value
        good = K >= D2 and K >= 1 + Dl
        ok &= good
        rows.append({"family": label, "window_radius": R, "r_max": rho, "K": K, "D2": D2,
                     "Delta": Dl, "holds": good})
    return _ok(ok), {"windows": rows}


@S.step("two_sided_on_complete_and_star")
def _(ctx):
    rows, ok = [], True
    for n in range(2, 9):
        for label in (f"complete:n={n}", f"star:n={n}"):
            G = graph(label)
            W = _full(G)
            rho = max(_diameter(G), 1)
            K = doubling_K_lb(G, W, rho).value
            D2 = dilation_lb(G, 2, W, rho).value
            Dl = max_degree_lb(G, W).value
            expect_D2 = Fraction(1) if label.startswith("complete") or n == 2 else Fraction(n, 2)
            good = max(D2, 1 + Dl) <= K <= D2 * (1 + Dl) and D2 == expect_D2
            ok &= good
            rows.append({"family": label, "K": K, "D2": D2, "Delta": Dl, "holds": good})
    return _ok(ok), {"graphs": rows}


S = suite("dilation-monotone", "several",
          "D_k <= D_k' <= D_k^(floor(log k'/log k)+1) for k < k'")

_MONO_WINDOWS = [("tree:k=3", 1, 2), ("comb", 4, 6), ("dyadic", 16, 8), ("oplusK", 8, 4),
                 ("shiftK", 6, 3), ("complete:n=6", 1, 1), ("star:n=6", 1, 2), ("linear:n=9", 8, 8)]
_PAIRS = [(2, 3), (2, 4), (3, 9)]


@S.step("monotone_in_k")
def _(ctx):
    rows, ok = [], True
    for label, R, rho in _MONO_WINDOWS:
        G = graph(label)
        W = Window.around(G, R)
        for k, k2 in _PAIRS:
            a = dilation_lb(G, k, W, rho).value
            b = dilation_lb(G, k2, W, rho).value
            ok &= a <= b
            rows.append({"family": label, "k": k, "k2": k2, "Dk": a, "Dk2": b, "holds": a <= b})
    return _ok(ok), {"rows": rows}


@S.step("power_bound_extended_domain")
def _(ctx):
    """The telescoping argument needs D_k over radii up to k^(p-1) r_max."""
    rows, ok = [], True
    for label, R, rho in _MONO_WINDOWS:
        G = graph(label)
        W = Window.around(G, R)
        for k, k2 in _PAIRS:
            p_tel = telescoping_exponent(k, k2)
            p = floor_log_exponent(k, k2)
            rho_ext = k ** (p_tel - 1) * rho
            lhs = dilation_lb(G, k2, W, rho).value
            base = dilation_lb(G, k, W, rho_ext).value
            good = lhs <= base**p_tel <= base**p
            ok &= good
            rows.append({"family": label, "k": k, "k2": k2, "exponent": p, "Dk2": lhs,
                         "Dk_extended": base, "r_max_extended": rho_ext, "holds": good})
    return _ok(ok), {"rows": rows}


@S.step("power_bound_same_domain")
def _(ctx):
    """Same inequality with D_k restricted to the same r_max (not implied)."""
    rows = []
    for label, R, rho in _MONO_WINDOWS:
        G = graph(label)
        W = Window.around(G, R)
        for k, k2 in _PAIRS:
            p = floor_log_exponent(k, k2)
            lhs = dilation_lb(G, k2, W, rho).value
            base = dilation_lb(G, k, W, rho).value
            if lhs > base**p:
                rows.append({"family": label, "k": k, "k2": k2, "Dk2": lhs, "Dk_pow": base**p})
    return NOTE, {"violations": rows, "count": len(rows)}


S = suite("rem-2.6", "several", "C <= D_2 (dilation implies ECP)")


@S.step("ecp_below_dilation")
def _(ctx):
    rows, ok = [], True
    cases = [("tree:k=3", 3), ("tree:k=4", 2), ("comb", 6)]
    cases += [(f"complete:n={n}", None) for n in range(3, 9)]
    cases += [(f"star:n={n}", None) for n in range(3, 9)]
    for label, R in cases:
        G = graph(label)
        if R is None:
            W, rho = _full(G), max(_diameter(G), 1)
        else:
            W, rho = Window.around(G, R), 2 * R  # 2R bounds the window diameter
        C = ecp_lb(G, W).value
        D2 = dilation_lb(G, 2, W, rho).value
        ok &= C <= D2
        rows.append({"family": label, "ECP": C, "D2": D2, "r_max": rho, "holds": C <= D2})
    return _ok(ok), {"rows": rows}


S = suite("prop-2.7", "oplusK", "D_2 <= 1 + O C, with O = 2 on the oplus-complete graph")


@S.step("dilation_vs_overlap_ecp")
def _(ctx):
    G = graph("oplusK")
    rows, ok = [], True
    for R, rho in ((8, 4), (16, 8)):
        W = Window.around(G, R)
        # C is needed at pairs (y, x) with y on S(x, r), so the ECP window is wider
        W2 = Window.around(G, R + rho)
        D2 = dilation_lb(G, 2, W, rho).value
        C = ecp_lb(G, W2).value
        good = D2 <= 1 + 2 * C
        ok &= good
        rows.append({"window_radius": R, "r_max": rho, "ecp_window_radius": R + rho,
                     "D2": D2, "ECP": C, "bound": 1 + 2 * C, "holds": good})
    return _ok(ok), {"rows": rows}


S = suite("rem-2.8", "several", "|B(x,2r)| <= (1 + Delta^r C) |B(x,r)|")


@S.step("local_doubling")
def _(ctx):
    rows, ok = [], True
    for label, R, rho in (("dyadic", 16, 8), ("tree:k=3", 2, 3), ("tree:k=4", 1, 3)):
        G = graph(label)
        W = Window.around(G, R)
        W2 = Window.around(G, R + rho)
        C = ecp_lb(G, W2).value
        Dl = int(max_degree_lb(G, W2).value)
        eng = engine_for(G)
        worst, bad = None, []
        for x in W.members:
            p = eng.profile(x, 2 * rho)
            for r in range(rho + 1):
                b1, b2 = p.ball_size(r), p.ball_size(2 * r)
                slack = (1 + Dl**r * C) * b1 / b2
                if worst is None or slack < worst[0]:
                    worst = (slack, x, r)
                if b2 > (1 + Dl**r * C) * b1:
                    bad.append({"x": x, "r": r})
        ok &= not bad
        rows.append({"family": label, "window_radius": R, "r_max": rho, "ECP": C, "Delta": Dl,
                     "tightest": {"ratio": worst[0], "x": worst[1], "r": worst[2]},
                     "violations": bad[:5]})
    return _ok(ok), {"rows": rows}


S = suite("prop-2.9", "tree", "lam |{M delta >= v}| <= C = 1 on regular trees")


@S.step("dirac_curve_below_one")
def _(ctx):
    floor = Fraction(ctx.knobs["tree_floor"])
    rows, ok = [], True
    for k in (3, 4):
        G = graph(f"tree:k={k}")
        est = weak_norm(G, FinSupFn.delta(G.origin), floor)
        top = max(p for _, p in est.curve)
        good = est.exact and top <= 1
        ok &= good
        rows.append({"k": k, "value_points": len(est.curve), "max_product": top,
                     "lower_bound": est.lower_bound, "exact": est.exact, "holds": good})
    return _ok(ok), {"rows": rows, "lambda_floor": floor}


@S.step("level_set_chain")
def _(ctx):
    rows, ok = [], True
    for k in (3, 4):
        G = graph(f"tree:k={k}")
        for i in range(1, 13):
            lam = Fraction(1, 2**i)
            rec = superlevel_count(G, FinSupFn.delta(G.origin), lam)
            good = rec.exact and lam * rec.count <= 1
            ok &= good
            rows.append({"k": k, "lambda": lam, "count": rec.count, "product": lam * rec.count})
    return _ok(ok), {"rows": rows}


S = suite("eq-2", "finite", "weak-type norm <= min{D_3, O} on finite graphs")


@S.step("finite_graphs")
def _(ctx):
    rows, ok = [], True
    n_rand = ctx.knobs["eq2_random"]
    for n in ctx.knobs["eq2_sizes"]:
        labels = [f"complete:n={n}", f"star:n={n}", f"linear:n={n}"]
        if n >= 3:
            labels.append(f"cycle:n={n}")
        for label in labels:
            G = graph(label)
            verts = G.vertices()
            rng = ctx.rng(f"eq-2:{label}")
            trials = [FinSupFn.delta(v) for v in verts]
            trials += [_rational_fn(rng, verts, rng.randint(1, len(verts))) for _ in range(n_rand)]
            floor = Fraction(1, 10**6)
            lb = operator_norm_lb(G, trials, floor)
            exact = max(exact_weak_norm_finite(G, f) / f.total_mass for f in trials)
            D3 = dilation_lb(G, 3, _full(G), max(_diameter(G), 1)).value
            O, _ = finite_overlap_index(G)
            good = lb == exact and lb <= min(D3, O)
            ok &= good
            rows.append({"family": label, "norm_lb": lb, "D3": D3, "O": O, "holds": good})
    return _ok(ok), {"rows": rows}


S = suite("finite-values", "finite", "index values of complete, star, cycle and linear graphs")


@S.step("overlap_index")
def _(ctx):
    rows, ok = [], True
    for n in range(2, 11):
        expect = {f"complete:n={n}": 1, f"star:n={n}": max(n - 1, 1)}
        if n >= 3:
            expect[f"linear:n={n}"] = 2
            expect[f"cycle:n={n}"] = 1 if n == 3 else 2
        for label, want in expect.items():
            O, fam = finite_overlap_index(graph(label))
            ok &= O == want
            rows.append({"family": label, "O": O, "expected": want, "witness": fam})
    return _ok(ok), {"rows": rows}


@S.step("dilation_index")
def _(ctx):
    rows, ok = [], True
    for n in range(2, 11):
        for k in (2, 3):
            for label, want in ((f"complete:n={n}", Fraction(1)),
                                (f"star:n={n}", Fraction(n, 2) if n > 2 else Fraction(1))):
                G = graph(label)
                D = dilation_lb(G, k, _full(G), max(_diameter(G), 1)).value
                ok &= D == want
                rows.append({"family": label, "k": k, "D": D, "expected": want})
    return _ok(ok), {"rows": rows}


@S.step("linear_tree_limit")
def _(ctx):
    rows, ok = [], True
    for k in (2, 3):
        vals = {}
        n0 = None
        n = 2
        while n0 is None or n < n0 + 10:
            G = graph(f"linear:n={n}")
            vals[n] = dilation_lb(G, k, _full(G), max(_diameter(G), 1)).value
            if n0 is None and vals[n] > k - Fraction(1, 10):
                n0 = n
            n += 1
        below = all(v < k for v in vals.values())
        tail = all(vals[m] > k - Fraction(1, 10) for m in vals if m >= n0)
        ok &= below and tail
        rows.append({"k": k, "n0": n0, "largest_n": n - 1, "value_at_n0": vals[n0],
                     "all_below_k": below, "tail_above": tail})
    return _ok(ok), {"rows": rows}


# =========================================================================
# the oplus-complete graph
# =========================================================================

S = suite("prop-3.1-i", "oplusK", "Delta is infinite: d(m,1) = 2m-3")


@S.step("degree_escalation")
def _(ctx):
    G = graph("oplusK")
    ms = [4, 8, 16, 32, 64]
    formula = all(len(G.neighbors((m, 1))) == 2 * m - 3 == closed_form_degree(
        parse_family("oplusK"), (m, 1)) for m in ms)
    e = escalate("degree of (m,1)", lambda m: len(G.neighbors((m, 1))), ms, 100)
    return _ok(formula and e.unbounded_evidence), {"escalation": _esc(e), "formula_2m-3": formula}


S = suite("prop-3.1-ii", "oplusK", "O = 2")


@S.step("forced_overlap_two")
def _(ctx):
    G = graph("oplusK")
    cert = overlap_certificate(G, BallFamily.of(G, [((3, 1), 1), ((4, 1), 1)]))
    good = cert.min_overlap == 2 and cert.private_points is not None
    return _ok(good), {"balls": cert.family.balls, "min_overlap": cert.min_overlap,
                       "private_points": cert.private_points}


@S.step("random_families_reduce_to_two")
def _(ctx):
    G = graph("oplusK")
    W = Window.around(G, 10)
    rng = ctx.rng("prop-3.1-ii")
    bad = []
    for _ in range(ctx.knobs["random_families"]):
        balls = [(rng.choice(W.members), rng.randint(0, 5)) for _ in range(rng.randint(2, 10))]
        if cover_reduce(BallFamily.of(G, balls), 2) is None:
            bad.append(balls)
    return _ok(not bad), {"families": ctx.knobs["random_families"], "counterexamples": bad[:3]}


@S.step("three_intersecting_balls")
def _(ctx):
    G = graph("oplusK")
    W = Window.around(G, 10)
    rng = ctx.rng("prop-3.1-ii:triples")
    bad, tried = [], 0
    while tried < ctx.knobs["random_families"]:
        balls = [(rng.choice(W.members), rng.randint(0, 5)) for _ in range(3)]
        F = BallFamily.of(G, balls)
        if not frozenset.intersection(*F.materialized):
            continue
        tried += 1
        sub = cover_reduce(F, 2)
        if sub is None or len(sub) > 2:
            bad.append(balls)
    return _ok(not bad), {"triples": tried, "counterexamples": bad[:3]}


S = suite("prop-3.1-iii", "oplusK", "D_2 <= 48")


@S.step("interval_bounds")
def _(ctx):
    return _interval_step(ctx, "oplusK")


@S.step("dilation_window")
def _(ctx):
    G = graph("oplusK")
    W = Window.around(G, ctx.knobs["interval_window"])
    est = dilation_lb(G, 2, W, 8)
    return _ok(est.value <= 48), est.summary() | {"bound": 48}


def _interval_step(ctx, label):
    G = graph(label)
    spec = parse_family(label)
    R = ctx.knobs["interval_window"]
    W = Window.around(G, R)
    rng = ctx.rng(f"interval:{label}")
    bad = []
    n = ctx.knobs["interval_samples"]
    for _ in range(n):
        v, r = rng.choice(W.members), rng.randint(1, R)
        if not check_interval_bounds(spec, v, r, G):
            bad.append({"v": v, "r": r, "size": engine_for(G).ball_size(v, r)})
    return _ok(not bad), {"samples": n, "window_radius": R, "violations": bad[:5]}


S = suite("prop-3.1-iv", "oplusK", "C <= 48")


@S.step("ecp_window")
def _(ctx):
    G = graph("oplusK")
    est = ecp_lb(G, Window.around(G, 24))
    return _ok(est.value <= 48), est.summary() | {"bound": 48}


S = suite("prop-3.1-v", "oplusK", "weak-type (1,1) with norm at most 2")


@S.step("trial_functions")
def _(ctx):
    return _weak_bound_step(ctx, "oplusK", 2, radius=6)


def _weak_bound_step(ctx, label, bound, radius, n_random=20):
    G = graph(label)
    W = Window.around(G, radius)
    rng = ctx.rng(f"weak:{label}")
    trials = [FinSupFn.delta(v) for v in W.members]
    trials += [_rational_fn(rng, W.members, rng.randint(2, 6)) for _ in range(n_random)]
    floor = Fraction(1, 256)
    lb = operator_norm_lb(G, trials, floor)
    return _ok(lb <= bound), {"norm_lb": lb, "bound": bound, "trials": len(trials),
                              "lambda_floor": floor}


# =========================================================================
# the shifted oplus-complete graph
# =========================================================================

S = suite("prop-3.2-i", "shiftK", "Delta is infinite: d(m,1) = m")


@S.step("degree_escalation")
def _(ctx):
    G = graph("shiftK")
    ms = [4, 8, 16, 32, 64]
    formula = all(len(G.neighbors((m, 1))) == m for m in ms)
    e = escalate("degree of (m,1)", lambda m: len(G.neighbors((m, 1))), ms, 48)
    return _ok(formula and e.unbounded_evidence), {"escalation": _esc(e), "formula_m": formula}


S = suite("prop-3.2-ii", "shiftK", "O = 5")


def five_balls(m: int) -> list:
    return [((m - 2, 0), 2), ((m - 1, 1), 2), ((m, 1), 1), ((m + 1, 1), 2), ((m + 2, 0), 2)]


@S.step("five_ball_certificate")
def _(ctx):
    G = graph("shiftK")
    rows, ok = [], True
    for m in (4, 5, 8, 19):
        cert = overlap_certificate(G, BallFamily.of(G, five_balls(m)))
        good = cert.min_overlap == 5
        ok &= good
        rows.append({"m": m, "balls": cert.family.balls, "min_overlap": cert.min_overlap,
                     "minimizing_subfamily": cert.minimizing_subfamily,
                     "private_points": cert.private_points})
    return _ok(ok), {"certificates": rows}


@S.step("random_families_reduce_to_five")
def _(ctx):
    G = graph("shiftK")
    W = Window.around(G, 10)
    rng = ctx.rng("prop-3.2-ii")
    bad = []
    for _ in range(ctx.knobs["random_families"]):
        balls = [(rng.choice(W.members), rng.randint(0, 4)) for _ in range(rng.randint(2, 12))]
        if cover_reduce(BallFamily.of(G, balls), 5) is None:
            bad.append(balls)
    return _ok(not bad), {"families": ctx.knobs["random_families"], "counterexamples": bad[:3]}


S = suite("prop-3.2-iii", "shiftK", "D_2 is infinite: |B((m,0),2)| / |B((m,0),1)| = (m+7)/4")


@S.step("stated_ball_values")
def _(ctx):
    G = graph("shiftK")
    eng = engine_for(G)
    bad = []
    for m in range(4, 21):
        got = (eng.ball_size((m, 0), 1), eng.ball_size((m, 0), 2), eng.ball_size((m, 1), 1))
        if got != (4, m + 7, m + 1):
            bad.append({"m": m, "sizes": got})
    return _ok(not bad), {"m_range": [4, 20], "mismatches": bad}


@S.step("first_spine_vertex")
def _(ctx):
    """At m = 3 the spine has no (m-2, 0), so |B((3,0),2)| is 9, not m+7."""
    eng = engine_for(graph("shiftK"))
    return NOTE, {"m": 3, "ball_1": eng.ball_size((3, 0), 1), "ball_2": eng.ball_size((3, 0), 2),
                  "formula_m+7": 10}


@S.step("dilation_escalation")
def _(ctx):
    G = graph("shiftK")
    ms = [4, 8, 16, 32, 64]

    def at(m):
        v = dilation_lb(G, 2, Window.of(G, [(m, 0)]), 1).value
        if v != Fraction(m + 7, 4):
            raise AssertionError(f"D_2 at (m,0) = {v}, expected {(m + 7)}/4")
        return v

    e = escalate("D_2 at (m,0), r=1", at, ms, 10)
    return _ok(e.unbounded_evidence), {"escalation": _esc(e)}


S = suite("prop-3.2-iv", "shiftK", "C is infinite: |B((m,1),1)| / |B((m,0),1)| = (m+1)/4")


@S.step("ecp_escalation")
def _(ctx):
    G = graph("shiftK")
    ms = [3, 7, 19, 39, 79]

    def at(m):
        v = ecp_lb(G, Window.of(G, [(m, 0), (m, 1)])).value
        if v < Fraction(m + 1, 4):
            raise AssertionError(f"ECP at m={m} is {v}")
        return v

    e = escalate("ECP on {(m,0),(m,1)}", at, ms, 10)
    return _ok(e.unbounded_evidence), {"escalation": _esc(e)}


S = suite("prop-3.2-v", "shiftK", "weak-type (1,1) with norm at most 5")


@S.step("trial_functions")
def _(ctx):
    return _weak_bound_step(ctx, "shiftK", 5, radius=5)


# =========================================================================
# regular trees
# =========================================================================

S = suite("prop-3.3-i", "tree", "Delta = k")


@S.step("max_degree")
def _(ctx):
    rows, ok = [], True
    for k in (3, 4, 5):
        G = graph(f"tree:k={k}")
        d = max_degree_lb(G, Window.around(G, 2)).value
        ok &= d == k
        rows.append({"k": k, "Delta": d})
    return _ok(ok), {"rows": rows}


S = suite("prop-3.3-ii", "tree", "O is infinite (k >= 3): sphere families force |S(x,r)| overlap")


def sphere_family(G, x, r) -> list:
    eng = engine_for(G)
    p = eng.profile(x, r)
    start = int(p.sizes[:r].sum())
    ys = sorted(eng.key(u) for u in p.order[start:start + int(p.sizes[r])].tolist())
    return [(y, r) for y in ys]


@S.step("sphere_certificates")
def _(ctx):
    G = graph("tree:k=3")
    x = G.origin
    rows, ok = [], True

    def at(r):
        nonlocal ok
        cert = overlap_certificate(G, BallFamily.of(G, sphere_family(G, x, r)))
        s = sphere_size(G, x, r)
        good = cert.private_points is not None and cert.min_overlap == s
        ok &= good
        rows.append({"r": r, "sphere_size": s, "min_overlap": cert.min_overlap,
                     "private_points": len(cert.private_points or {})})
        return cert.min_overlap

    e = escalate("overlap of {B(y,r): y in S(x,r)}", at, [1, 2, 3, 4], 12)
    return _ok(ok and e.unbounded_evidence), {"escalation": _esc(e), "rows": rows}


S = suite("prop-3.3-iii", "tree", "D_2 is infinite")


@S.step("dilation_escalation")
def _(ctx):
    G = graph("tree:k=3")
    W = Window.around(G, 1)
    e = escalate("D_2 over r <= r_max", lambda s: dilation_lb(G, 2, W, s).value, [1, 2, 3, 4, 5, 6], 32)
    return _ok(e.unbounded_evidence), {"escalation": _esc(e)}


S = suite("prop-3.3-iv", "tree", "C = 1")


@S.step("ecp_is_one")
def _(ctx):
    rows, ok = [], True
    for k, R in ((3, 4), (4, 3)):
        G = graph(f"tree:k={k}")
        v = ecp_lb(G, Window.around(G, R)).value
        ok &= v == 1
        rows.append({"k": k, "window_radius": R, "ECP": v})
    return _ok(ok), {"rows": rows}


@S.step("equal_ball_sizes")
def _(ctx):
    bad = []
    for k in (3, 4, 5):
        G = graph(f"tree:k={k}")
        eng = engine_for(G)
        spec = parse_family(f"tree:k={k}")
        for x in Window.around(G, 2).members:
            for r in range(6):
                if eng.ball_size(x, r) != closed_form_ball_size(spec, x, r):
                    bad.append({"k": k, "x": x, "r": r})
    return _ok(not bad), {"mismatches": bad[:5]}


S = suite("prop-3.3-v", "tree", "weak-type (1,1), uniformly in k (external result, cited)")


@S.step("dirac_bounded_evidence")
def _(ctx):
    floor = Fraction(ctx.knobs["tree_floor"])
    rows, ok = [], True
    for k in (3, 4):
        G = graph(f"tree:k={k}")
        est = weak_norm(G, FinSupFn.delta(G.origin), floor)
        good = est.verdict == "bounded_evidence" and est.lower_bound <= 1
        ok &= good
        rows.append({"k": k, "lower_bound": est.lower_bound, "verdict": est.verdict})
    return _ok(ok), {"rows": rows, "lambda_floor": floor}


@S.step("uniform_constant")
def _(ctx):
    return NOTE, {"cited": "external uniform weak-type bound for regular trees",
                  "verified": False}


# =========================================================================
# the comb
# =========================================================================

S = suite("prop-3.4-i", "comb", "Delta = 3")


@S.step("max_degree")
def _(ctx):
    G = graph("comb")
    est = max_degree_lb(G, Window.around(G, 8))
    return _ok(est.value == 3), est.summary()


S = suite("prop-3.4-ii", "comb", "O is infinite")


def tooth_family(n: int) -> list:
    """Balls through o, each owning the tip (j, j+2) of its own tooth."""
    return [((j, 1), j + 1) for j in range(1, n + 1)]


@S.step("tooth_certificates")
def _(ctx):
    G = graph("comb")
    rows, ok = [], True

    def at(n):
        nonlocal ok
        F = BallFamily.of(G, tooth_family(n))
        cert = overlap_certificate(G, F)
        priv = private_points_of(F)
        good = (cert.min_overlap == n and len(priv) == n
                and all((0, 0) in m for m in F.materialized))
        ok &= good
        rows.append({"n": n, "min_overlap": cert.min_overlap, "private_points": priv})
        return cert.min_overlap

    e = escalate("overlap of tooth family", at, [2, 4, 8, 16], 8)
    return _ok(ok and e.unbounded_evidence), {"escalation": _esc(e), "rows": rows}


S = suite("prop-3.4-iii", "comb", "D_2 is infinite")


@S.step("dilation_escalation")
def _(ctx):
    G = graph("comb")

    def at(k):
        v = dilation_lb(G, 2, Window.of(G, [(0, k)]), k).value
        if v < Fraction((k + 1) ** 2 + 2 * k, 2 * k + 1):
            raise AssertionError(f"D_2 at (0,{k}) is {v}")
        return v

    e = escalate("D_2 at (0,k), r <= k", at, [2, 4, 8, 16, 32], 8)
    return _ok(e.unbounded_evidence), {"escalation": _esc(e)}


S = suite("prop-3.4-iv", "comb", "C is infinite")


@S.step("ecp_escalation")
def _(ctx):
    G = graph("comb")

    def at(k):
        v = ecp_lb(G, Window.of(G, [(0, 0), (0, k)])).value
        if v != Fraction((k + 1) ** 2, 2 * k + 1):
            raise AssertionError(f"ECP on o,(0,{k}) is {v}")
        return v

    e = escalate("ECP on {(0,0),(0,k)}", at, [2, 4, 8, 16, 32], 8)
    return _ok(e.unbounded_evidence), {"escalation": _esc(e)}


S = suite("prop-3.4-v", "comb", "not weak-type (1,1), even on Dirac deltas")


def comb_bound_holds(count: int, L: int, coef: Fraction) -> bool:
    """``count >= coef L^{3/2} - 2L + 2`` decided exactly (``L = 1/lam``)."""
    rest = Fraction(count + 2 * L - 2)
    if rest < 0:
        return False
    return (rest / coef) ** 2 >= L**3


@lru_cache(maxsize=None)
def comb_delta_scan(floor: Fraction):
    G = graph("comb")
    return weak_norm(G, FinSupFn.delta((0, 0)), floor)


def count_above(est, lam: Fraction) -> int:
    """``|{M f > lam}|`` read off a weak-norm scan whose floor is <= lam."""
    if lam < est.lambda_floor:
        raise ValueError("lambda below the scanned floor")
    return max((j for v, j in est.counts if v > lam), default=0)


@S.step("level_counts")
def _(ctx):
    G = graph("comb")
    est = comb_delta_scan(Fraction(1, 2**12))
    rows = []
    ok = est.exact
    for i in range(4, 13):
        L = 2**i
        c = count_above(est, Fraction(1, L))
        if i <= 8:  # independent recount on the cheap levels
            rec = superlevel_count(G, FinSupFn.delta((0, 0)), Fraction(1, L))
            ok &= rec.exact and rec.count == c
        corrected = comb_bound_holds(c, L, Fraction(2, 3))
        ok &= corrected
        rows.append({"i": i, "count": c, "product": Fraction(c, L), "bound_2/3": corrected,
                     "bound_3/2": comb_bound_holds(c, L, Fraction(3, 2))})
    products = {row["i"]: row["product"] for row in rows}
    e = escalate("lam * count at lam = 2^-i", products.__getitem__, sorted(products), 16)
    ok &= e.unbounded_evidence
    return _ok(ok), {"rows": rows, "escalation": _esc(e)}


@S.step("divergence_fit")
def _(ctx):
    floor = Fraction(ctx.knobs["comb_floor"])
    est = comb_delta_scan(floor)
    ok = est.verdict == "divergence_evidence" and -0.6 <= est.divergence_exponent <= -0.4
    return _ok(ok), {"lower_bound": est.lower_bound, "attained_at_lambda": est.attained_at_lambda,
                     "divergence_exponent": est.divergence_exponent,
                     "fit_residual": est.fit_residual, "verdict": est.verdict,
                     "lambda_floor": floor}


@S.step("stated_count_bound")
def _(ctx):
    """The printed coefficient 3/2 exceeds the integral's 2/3; recorded only."""
    est = comb_delta_scan(Fraction(1, 2**12))
    fails = []
    for i in range(4, 13):
        L = 2**i
        c = count_above(est, Fraction(1, L))
        if not comb_bound_holds(c, L, Fraction(3, 2)):
            fails.append({"i": i, "count": c})
    lam = Fraction(1, 2**12)
    return NOTE, {"coefficient": Fraction(3, 2), "fails_at": fails,
                  "product_at_2^-12": lam * count_above(est, lam), "stated_product_floor": 90}


# =========================================================================
# the steplike dyadic tree
# =========================================================================

S = suite("prop-3.5-i", "dyadic", "Delta = 3")


@S.step("max_degree")
def _(ctx):
    G = graph("dyadic")
    est = max_degree_lb(G, Window.around(G, 2, (2, 0)))
    return _ok(est.value == 3), est.summary()


S = suite("prop-3.5-ii", "dyadic", "O is infinite")


def dyadic_family(N: int) -> list:
    return [((2**n, 1), 2**n) for n in range(1, N + 1)]


@S.step("tower_certificates")
def _(ctx):
    G = graph("dyadic")
    rows, ok = [], True

    def at(N):
        nonlocal ok
        F = BallFamily.of(G, dyadic_family(N))
        cert = overlap_certificate(G, F)
        priv = cert.private_points or {}
        tips = all(_only_in(F, (2**m, 2**m), m - 1) for m in range(1, N + 1))
        good = cert.min_overlap == N and all((1, 0) in s for s in F.materialized) and tips
        ok &= good
        rows.append({"N": N, "min_overlap": cert.min_overlap, "private_points": priv})
        return cert.min_overlap

    e = escalate("overlap of {B_n : n <= N}", at, [2, 3, 4, 5, 6], 4)
    return _ok(ok and e.unbounded_evidence), {"escalation": _esc(e), "rows": rows}


def _only_in(F: BallFamily, v, i: int) -> bool:
    return [j for j, m in enumerate(F.materialized) if v in m] == [i]


S = suite("prop-3.5-iii", "dyadic", "D_2 <= 48 (from r <= |B(x,r)| <= 24 r)")


@S.step("interval_bounds")
def _(ctx):
    return _interval_step(ctx, "dyadic")


@S.step("dilation_window")
def _(ctx):
    G = graph("dyadic")
    R = ctx.knobs["interval_window"]
    est = dilation_lb(G, 2, Window.around(G, R), R)
    return _ok(est.value <= 48), est.summary() | {"bound": 48}


S = suite("prop-3.5-iv", "dyadic", "C <= 24")


@S.step("ecp_window")
def _(ctx):
    G = graph("dyadic")
    est = ecp_lb(G, Window.around(G, 48))
    return _ok(est.value <= 24), est.summary() | {"bound": 24}


S = suite("prop-3.5-v", "dyadic", "weak-type (1,1), with norm at most 72")


@S.step("trial_functions")
def _(ctx):
    return _weak_bound_step(ctx, "dyadic", 72, radius=12)


# =========================================================================
# spherical maximal function
# =========================================================================

S = suite("lemma-4.2", "several", "each step of the distributional lemma for A_r")


@S.step("random_dyadic_functions")
def _(ctx):
    rows, ok = [], True
    n = ctx.knobs["lemma42_trials"]
    for label, R, pool_r in (("tree:k=3", 9, 3), ("comb", 12, 4)):
        G = graph(label)
        W = Window.around(G, R)
        pool = Window.around(G, pool_r).members
        rng = ctx.rng(f"lemma42:{label}")
        failed = []
        for t in range(n):
            f = _dyadic_fn(rng, pool, rng.randint(1, 5))
            r = rng.randint(1, 4)
            rep = lemma42_check(G, f, r, W)
            if not rep.passed:
                failed.append({"trial": t, "r": r, "f": f.values,
                               "steps": [s.name for s in rep.steps if not s.passed]})
        ok &= not failed
        rows.append({"family": label, "trials": n, "failures": failed[:3]})
    return _ok(ok), {"rows": rows}


@S.step("tree_delta")
def _(ctx):
    G = graph("tree:k=3")
    rep = lemma42_check(G, FinSupFn.delta(G.origin), 1, Window.around(G, 4))
    return _ok(rep.passed), {"S": rep.S, "n_r": rep.n_r, "E": rep.E, "F": rep.F,
                             "steps": {s.name: s.passed for s in rep.steps}}


S = suite("sphere-expander", "several", "M <= M-sphere, |S(x,r)| >= 1/q, E_{T_k}(r) ~ k^-r")


@S.step("pointwise_domination")
def _(ctx):
    rows, ok = [], True
    n = ctx.knobs["domination_trials"]
    for label in ("tree:k=3", "comb", "dyadic", "oplusK", "shiftK"):
        G = graph(label)
        pool = Window.around(G, 4).members
        rng = ctx.rng(f"domination:{label}")
        bad = []
        for _ in range(n):
            f = _rational_fn(rng, pool, rng.randint(1, 4))
            x = rng.choice(pool)
            if hl_maximal_at(G, f, x) > spherical_maximal_at(G, f, x):
                bad.append({"f": f.values, "x": x})
        ok &= not bad
        rows.append({"family": label, "trials": n, "violations": bad[:3]})
    return _ok(ok), {"rows": rows}


@S.step("exhaustive_tree_value")
def _(ctx):
    G = graph("tree:k=3")
    est = expander_lb(G, 1, Window.around(G, 2), 3, "exhaustive")
    return _ok(est.q_value == Fraction(1, 3)), {
        "q_value": est.q_value, "witness_A": est.witness_A, "witness_B": est.witness_B,
        "search_value": est.search_value}


@S.step("sphere_duality")
def _(ctx):
    rows, ok = [], True
    for label, R, r in (("tree:k=3", 2, 1), ("tree:k=3", 3, 2), ("comb", 3, 1), ("comb", 3, 2),
                        ("dyadic", 4, 1), ("dyadic", 4, 2)):
        G = graph(label)
        W = Window.around(G, R)
        est = expander_lb(G, r, W, 4 if len(W) <= 16 else 3, "exhaustive")
        sup = sphere_sup_lb(G, r, W)
        smallest = min(sphere_size(G, x, r) for x in W.members)
        good = est.q_value * sup.value >= 1 and est.q_value * smallest >= 1
        ok &= good
        rows.append({"family": label, "window_radius": R, "r": r, "q": est.q_value,
                     "sphere_sup": sup.value, "smallest_sphere": smallest, "holds": good})
    return _ok(ok), {"rows": rows}


@S.step("tree_decay")
def _(ctx):
    rows, ok = [], True
    for k, r in ((3, 1), (3, 2), (4, 1), (4, 2)):
        G = graph(f"tree:k={k}")
        est = expander_lb(G, r, Window.around(G, r + 1), 3, "exhaustive")
        scaled = est.q_value * k**r
        good = 1 <= scaled <= 8
        ok &= good
        rows.append({"k": k, "r": r, "q": est.q_value, "q_times_k^r": scaled,
                     "search_value": est.search_value, "canonical_value": est.canonical_value})
    return _ok(ok), {"rows": rows}


@S.step("expander_lower_bound_one")
def _(ctx):
    rows = []
    for k in (3, 4):
        G = graph(f"tree:k={k}")
        est = expander_lb(G, 1, Window.around(G, 2), 3, "exhaustive")
        rows.append({"k": k, "observed_max": est.q_value, "at_least_one": est.q_value >= 1})
    return NOTE, {"rows": rows}


def suite_ids() -> list:
    return list(SUITES)


__all__ = ["ALIASES", "Context", "FAIL", "NOTE", "PASS", "SUITES", "StepResult", "SuiteReport",
           "comb_bound_holds", "dyadic_family", "five_balls", "graph", "resolve", "run_many",
           "run_suite", "sphere_family", "suite_ids", "tooth_family"]
