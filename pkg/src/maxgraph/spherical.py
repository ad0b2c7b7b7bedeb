"""Spherical averages and maximal function, sphere growth, expander values.

Also the bound functional ``sup_n 2^{n/2} sum_{S(r) >= 2^{n-1}} E(r) S(r)^{1/2}``
and a step-by-step checker for the distributional lemma behind it, with
every inequality decided in exact arithmetic (fourth roots and square roots
are removed by raising both sides to a power).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core_graph import GraphError, GraphOracle
from ._engine import engine_for
from .indices import Window
from .maximal import FinSupFn


class EmptySphere(GraphError, ValueError):
    pass


class InvalidSequence(GraphError, ValueError):
    pass


class WindowTooSmall(GraphError):
    pass


# -- spheres ---------------------------------------------------------------


def sphere_ids(G: GraphOracle, x, r: int) -> list:
    """Engine ids of S(x, r) (empty past the eccentricity of a finite graph)."""
    eng = engine_for(G)
    p = eng.profile(G.check(x), r)
    if p.radius < r:
        return []
    start = int(p.sizes[:r].sum())
    return p.order[start:start + int(p.sizes[r])].tolist()


def sphere_size(G: GraphOracle, x, r: int) -> int:
    p = engine_for(G).profile(G.check(x), r)
    return int(p.sizes[r]) if p.radius >= r else 0


def spherical_avg(G: GraphOracle, f: FinSupFn, x, r: int) -> Fraction:
    """``|S(x,r)|^-1 sum_{S(x,r)} f``."""
    eng = engine_for(G)
    ids = sphere_ids(G, x, r)
    if not ids:
        raise EmptySphere(f"S({x}, {r}) is empty")
    total = sum((f(eng.key(u)) for u in ids), Fraction(0))
    return total / len(ids)


def spherical_maximal_at(G: GraphOracle, f: FinSupFn, x) -> Fraction:
    """``max_r A_r f(x)`` over r up to the eccentricity of the support."""
    if not f:
        raise ValueError("empty function")
    eng = engine_for(G)
    x = G.check(x)
    targets = {eng.index(G.check(y)): v for y, v in f.values.items()}
    R = 4
    while True:
        p = eng.profile(x, R)
        found = {}
        start = 0
        best = Fraction(0)
        for r, s in enumerate(p.sizes.tolist()):
            layer = p.order[start:start + s].tolist()
            start += s
            mass = sum((targets[u] for u in layer if u in targets), Fraction(0))
            for u in layer:
                if u in targets:
                    found[u] = True
            if s:
                best = max(best, mass / s)
        if len(found) == len(targets):
            return best
        if p.radius < R:
            raise GraphError("support not reachable")
        R *= 2


@dataclass
class SphereSupEstimate:
    r: int
    value: int
    window: Window
    closed_form: int | None
    witness: tuple | None = None


def sphere_sup_lb(G: GraphOracle, r: int, window: Window) -> SphereSupEstimate:
    """``max_{x in window} |S(x, r)|``."""
    from .families import closed_form_sphere_sup, spec_of

    best, arg = -1, None
    for x in window.members:
        s = sphere_size(G, x, r)
        if s > best:
            best, arg = s, x
    try:
        cf = closed_form_sphere_sup(spec_of(G), r)
    except GraphError:
        cf = None
    if cf is not None and G.is_finite:
        cf = None
    return SphereSupEstimate(r, best, window, cf, arg)


# -- expander values -------------------------------------------------------


def expander_pair_value(G: GraphOracle, A, B, r: int) -> Fraction:
    """``(sum_{x in B} |A ∩ S(x,r)| / |S(x,r)|)^2 / (|A| |B|)``."""
    A = {G.check(a) for a in A}
    B = {G.check(b) for b in B}
    if not A or not B:
        raise ValueError("A and B must be nonempty")
    eng = engine_for(G)
    aid = {eng.index(a) for a in A}
    s = Fraction(0)
    for x in sorted(B):
        ids = sphere_ids(G, x, r)
        if not ids:
            raise EmptySphere(f"S({x}, {r}) is empty")
        s += Fraction(sum(1 for u in ids if u in aid), len(ids))
    return s * s / (len(A) * len(B))


@dataclass
class ExpanderEstimate:
    r: int
    q_value: Fraction
    witness_A: tuple
    witness_B: tuple
    mode: str
    seed: int | None = None
    search_value: Fraction | None = None  # best over the searched subsets only
    canonical_value: Fraction | None = None  # best A={x}, B=S(x,r)


class _SphereTable:
    """Window-restricted incidence: ``inc[a, x] = 1`` iff ``a ∈ S(x, r)``."""

    def __init__(self, G: GraphOracle, r: int, window: Window):
        self.xs = list(window.members)
        eng = engine_for(G)
        pos = {eng.index(v): i for i, v in enumerate(self.xs)}
        n = len(self.xs)
        self.inc = np.zeros((n, n), np.int64)
        self.size = np.zeros(n, np.int64)
        for j, x in enumerate(self.xs):
            ids = sphere_ids(G, x, r)
            if not ids:
                raise EmptySphere(f"S({x}, {r}) is empty")
            self.size[j] = len(ids)
            for u in ids:
                i = pos.get(u)
                if i is not None:
                    self.inc[i, j] = 1

    def best_B(self, A: tuple, max_size: int):
        """Best ``B`` for fixed ``A``: top values of ``|A ∩ S(x,r)| / |S(x,r)|``."""
        counts = self.inc[list(A)].sum(axis=0)
        vals = [Fraction(int(c), int(s)) for c, s in zip(counts, self.size)]
        order = sorted(range(len(vals)), key=lambda j: (-vals[j], j))
        best, arg, acc = Fraction(-1), None, Fraction(0)
        for b in range(1, max_size + 1):
            acc += vals[order[b - 1]]
            q = acc * acc / (len(A) * b)
            if q > best:
                best, arg = q, tuple(sorted(order[:b]))
        return best, arg

    def best_A(self, B: tuple, max_size: int):
        w = [Fraction(0)] * len(self.xs)
        for j in B:
            s = int(self.size[j])
            for i in np.flatnonzero(self.inc[:, j]).tolist():
                w[i] += Fraction(1, s)
        order = sorted(range(len(w)), key=lambda i: (-w[i], i))
        best, arg, acc = Fraction(-1), None, Fraction(0)
        for a in range(1, max_size + 1):
            acc += w[order[a - 1]]
            q = acc * acc / (a * len(B))
            if q > best:
                best, arg = q, tuple(sorted(order[:a]))
        return best, arg


def expander_lb(G: GraphOracle, r: int, window: Window, max_size: int = 3,
                mode: str = "exhaustive", seed: int = 0, restarts: int = 64) -> ExpanderEstimate:
    """Certified lower bound for ``E_G(r)`` from subsets of the window.

    Exhaustive mode enumerates every ``A`` with ``|A| <= max_size``; for a
    fixed ``A`` the best ``B`` of each size is the top of the per-vertex
    ratios, so the search over pairs is exact.  Stochastic mode alternates
    best responses from random seeds.  In both modes the canonical pairs
    ``A = {x}``, ``B = S(x, r)`` for window vertices are also evaluated.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    tab = _SphereTable(G, r, window)
    n = len(tab.xs)
    best, bA, bB = Fraction(-1), None, None
    if mode == "exhaustive":
        for a in range(1, min(max_size, n) + 1):
            for A in itertools.combinations(range(n), a):
                q, B = tab.best_B(A, min(max_size, n))
                if q > best:
                    best, bA, bB = q, A, B
    elif mode == "stochastic":
        rng = random.Random(seed)
        for _ in range(restarts):
            A = tuple(sorted(rng.sample(range(n), rng.randint(1, min(max_size, n)))))
            q = Fraction(-1)
            while True:
                q1, B = tab.best_B(A, min(max_size, n))
                q2, A2 = tab.best_A(B, min(max_size, n))
                if q2 <= q:
                    break
                q, A = q2, A2
                if q > best:
                    best, bA, bB = q, A, B
            if q1 > best:
                best, bA, bB = q1, A, B
    else:
        raise ValueError(f"unknown mode {mode!r}")
    search = best
    wA = tuple(tab.xs[i] for i in bA)
    wB = tuple(tab.xs[j] for j in bB)
    canon_best = Fraction(-1)
    eng = engine_for(G)
    for x in tab.xs:
        S = [eng.key(u) for u in sphere_ids(G, x, r)]
        q = expander_pair_value(G, [x], S, r)
        if q > canon_best:
            canon_best = q
            cA, cB = (x,), tuple(sorted(S))
    if canon_best > best:
        best, wA, wB = canon_best, cA, cB
    return ExpanderEstimate(r, best, wA, wB, mode, seed if mode == "stochastic" else None,
                            search, canon_best)


# -- the bound functional ----------------------------------------------------


@dataclass
class SequencePair:
    S: dict  # r -> S_G(r)
    E: dict  # r -> E_G(r)
    r_max: int
    tail: str = "truncate"  # or "geometric"
    ratio: float | None = None  # term ratio for the geometric tail
    growth: float = 1.0  # S(r+1)/S(r) beyond r_max
    provenance: str = ""

    def __post_init__(self):
        for r in range(self.r_max + 1):
            if r not in self.S or r not in self.E:
                raise InvalidSequence(f"sequence missing r = {r}")
            if self.S[r] < 0 or self.E[r] < 0:
                raise InvalidSequence(f"negative entry at r = {r}")
        if self.tail not in ("truncate", "geometric"):
            raise InvalidSequence(f"unknown tail mode {self.tail!r}")
        if self.tail == "geometric":
            if self.ratio is None or self.ratio <= 0:
                raise InvalidSequence("geometric tail needs a positive ratio")
            if self.growth <= 0:
                raise InvalidSequence("growth must be positive")


@dataclass
class Thm41Result:
    value: float
    argmax_n: int
    per_n: list = field(default_factory=list)
    truncated: bool = False


def _term(seq: SequencePair, r: int) -> float:
    return float(seq.E[r]) * math.sqrt(float(seq.S[r]))


def thm41_rhs(seq: SequencePair, n_max: int) -> Thm41Result:
    """``sup_{0<=n<=n_max} 2^{n/2} sum_{r: S(r) >= 2^{n-1}} E(r) S(r)^{1/2}``."""
    per_n = []
    for n in range(n_max + 1):
        level = 2.0 ** (n - 1)
        total = sum(_term(seq, r) for r in range(seq.r_max + 1) if seq.S[r] >= level)
        if seq.tail == "geometric":
            total += _geometric_tail(seq, level)
        per_n.append(2.0 ** (n / 2) * total)
    top = max(per_n)
    # values equal up to rounding count as ties; report the smallest n
    best = next(n for n, v in enumerate(per_n) if v >= top * (1 - 1e-12))
    return Thm41Result(per_n[best], best, per_n, seq.tail == "truncate")


def _geometric_tail(seq: SequencePair, level: float) -> float:
    t0 = _term(seq, seq.r_max)
    s0 = float(seq.S[seq.r_max])
    q, g = seq.ratio, seq.growth
    if t0 == 0:
        return 0.0
    # r = r_max + i, i >= 1: term t0 q^i, sphere s0 g^i
    if g >= 1:
        if s0 >= level:
            i0 = 1
        elif g == 1:
            return 0.0
        else:
            i0 = max(1, math.ceil(math.log(level / s0) / math.log(g) - 1e-12))
            while s0 * g**i0 < level:
                i0 += 1
        if q >= 1:
            return math.inf
        return t0 * q**i0 / (1 - q)
    total, i = 0.0, 1
    while s0 * g**i >= level:  # shrinking spheres: finitely many qualify
        total += t0 * q**i
        i += 1
    return total


def load_sequence(path) -> SequencePair:
    """Header ``tail truncate`` or ``tail geometric ratio=q growth=g``, then ``r S E`` lines."""
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("tail"):
        raise InvalidSequence(f"{path}: first line must declare the tail mode")
    head = lines[0].split()
    if len(head) < 2:
        raise InvalidSequence(f"{path}: malformed tail declaration")
    mode = head[1]
    opts = {}
    for item in head[2:]:
        k, eq, v = item.partition("=")
        if not eq:
            raise InvalidSequence(f"{path}: malformed option {item!r}")
        opts[k] = Fraction(v) if "/" in v else float(v)
    S, E = {}, {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise InvalidSequence(f"{path}: expected 'r S E', got {ln!r}")
        try:
            r = int(parts[0])
            S[r], E[r] = Fraction(parts[1]), Fraction(parts[2])
        except (ValueError, ZeroDivisionError):
            raise InvalidSequence(f"{path}: bad numbers in {ln!r}") from None
    if not S:
        raise InvalidSequence(f"{path}: no data lines")
    r_max = max(S)
    ratio = opts.get("ratio")
    return SequencePair(S, E, r_max, mode, None if ratio is None else float(ratio),
                        float(opts.get("growth", 1.0)), provenance=str(path))


# -- the distributional lemma --------------------------------------------


@dataclass
class Step:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class Lemma42Report:
    r: int
    S: int
    n_r: int
    E: dict  # n -> sorted vertices
    F: dict  # n -> sorted vertices
    steps: list
    boundary_touched: bool = False

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps)


def level_index(v: Fraction) -> int | None:
    """``n >= 0`` with ``2^{n-1} <= v < 2^n``; ``None`` when ``v < 1/2``."""
    if v < Fraction(1, 2):
        return None
    n = 0
    while v >= 2**n:
        n += 1
    return n


def _ge_fourth_root_threshold(a: Fraction, n: int, S: int) -> bool:
    """``a >= 2^{-(n+4)} (2^n / S)^{1/4}``, i.e. ``a^4 S 2^{4n+16} >= 2^n``."""
    return a**4 * S * 2 ** (4 * n + 16) >= 2**n


def lemma42_check(G: GraphOracle, f: FinSupFn, r: int, window: Window, lam=1) -> Lemma42Report:
    """Verify each step of the distributional lemma for ``A_r`` on ``f / lam``."""
    if r < 1:
        raise ValueError("r must be positive")
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    f = f.scale(1 / lam) if lam != 1 else f
    eng = engine_for(G)
    inside = set(window.members)
    base = window.base
    dist_base = {}
    if window.radius >= 0:
        p = eng.profile(base, window.radius)
        start = 0
        for d, s in enumerate(p.sizes.tolist()):
            for u in p.order[start:start + s].tolist():
                dist_base[eng.key(u)] = d
            start += s

    def strictly_inside(v):
        if window.radius >= 0:
            return dist_base.get(v, window.radius) < window.radius
        return v in inside

    support = f.support
    sph = {}
    cand = set()
    for y in support:
        sph[y] = [eng.key(u) for u in sphere_ids(G, y, r)]
        cand.update(sph[y])
    bad = sorted(v for v in set(support) | cand if not strictly_inside(v))
    if bad:
        raise WindowTooSmall(f"vertices {bad[:3]} reach the window boundary")
    S = max(sphere_size(G, x, r) for x in window.members)
    n_r = S.bit_length() - 1  # 2^{n_r} <= S < 2^{n_r + 1}
    cand = sorted(cand)
    spheres = {x: [eng.key(u) for u in sphere_ids(G, x, r)] for x in cand}

    E = {n: [] for n in range(n_r + 1)}
    big = []
    for y, v in f.values.items():
        n = level_index(v)
        if n is not None and n <= n_r:
            E[n].append(y)
        if v >= 2**n_r:
            big.append(y)
    Eset = {n: set(vs) for n, vs in E.items()}
    bigset = set(big)

    steps = []
    # (a) pointwise decomposition
    worst = None
    for y, v in f.values.items():
        n = level_index(v)
        rhs = Fraction(1, 2) + (2**n if n is not None and n <= n_r else 0) + (v if y in bigset else 0)
        if v > rhs:
            worst = (y, v, rhs)
            break
    steps.append(Step("a_decomposition", worst is None,
                      {"counterexample": worst} if worst else {"checked": len(f.values)}))

    # averages of the indicator pieces on each candidate
    avg = {}
    for x in cand:
        s = len(spheres[x])
        avg[x] = {n: Fraction(sum(1 for u in spheres[x] if u in Eset[n]), s) for n in E}
    F = {n: sorted(x for x in cand if avg[x][n] and _ge_fourth_root_threshold(avg[x][n], n, S))
         for n in E}
    Fset = {n: set(v) for n, v in F.items()}

    # (b) pigeonhole into some F_n
    miss = [x for x in cand
            if sum((2**n * avg[x][n] for n in E), Fraction(0)) >= Fraction(1, 2)
            and not any(x in Fset[n] for n in E)]
    steps.append(Step("b_pigeonhole", not miss, {"uncovered": miss[:5]}))

    # (c) support of the large part
    nz = set()
    for y in big:
        nz.update(sph[y])
    ok_c = len(nz) <= S * len(big)
    steps.append(Step("c_large_part_support", ok_c,
                      {"lhs": len(nz), "rhs": S * len(big)}))

    # (d) |F_n|^2 <= 2^{3n+16} q(E_n, F_n)^2 S |E_n|^2
    fails_d, detail_d = [], {}
    for n in E:
        if not F[n]:
            continue
        q = expander_pair_value(G, E[n], F[n], r)
        lhs = len(F[n]) ** 2
        rhs = 2 ** (3 * n + 16) * q * q * S * len(E[n]) ** 2
        detail_d[n] = {"F": len(F[n]), "E": len(E[n]), "q": q}
        if lhs > rhs:
            fails_d.append(n)
    steps.append(Step("d_cauchy_schwarz", not fails_d, {"per_n": detail_d, "failed": fails_d}))

    # (e) the assembled count
    level1 = [x for x in cand if sum((f(y) for y in spheres[x]), Fraction(0)) >= len(spheres[x])]
    lhs = len(level1)
    rhs = sum(len(F[n]) for n in E) + S * len(big)
    steps.append(Step("e_total", lhs <= rhs, {"lhs": lhs, "rhs": rhs}))
    return Lemma42Report(r, S, n_r, {n: sorted(v) for n, v in E.items()}, F, steps)
