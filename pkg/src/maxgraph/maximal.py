"""Centered Hardy-Littlewood maximal function on finitely supported data.

Values are exact ``Fraction`` objects.  The enumeration of superlevel sets
rests on one bound: for ``d = d(x, supp f)``,

    M f(x) <= ||f||_1 / |B(x, d)|,

so ``M f(x) > lam`` forces ``|B(x, d)| < ||f||_1 / lam``.  That property is
inherited along shortest paths towards the support, hence a multi-source BFS
from the support that only expands such vertices visits every candidate.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core_graph import (
    DEFAULT_MAX_MEMBERS, GraphError, GraphOracle, ResourceLimit, bfs_layers,
)
from ._engine import engine_for

_INT64_SAFE = 2**62


class EmptyFunction(GraphError, ValueError):
    pass


class FinSupFn:
    """A finitely supported, strictly positive rational function."""

    __slots__ = ("values",)

    def __init__(self, values: dict):
        clean = {}
        for k, v in values.items():
            q = Fraction(v)
            if q < 0:
                raise ValueError(f"negative value at {k!r}; pass |f|")
            if q:
                clean[tuple(k)] = q
        self.values = dict(sorted(clean.items()))

    @classmethod
    def delta(cls, x) -> "FinSupFn":
        return cls({tuple(x): 1})

    @property
    def support(self) -> list:
        return list(self.values)

    @property
    def total_mass(self) -> Fraction:
        return sum(self.values.values(), Fraction(0))

    def __call__(self, x) -> Fraction:
        return self.values.get(tuple(x), Fraction(0))

    def __bool__(self) -> bool:
        return bool(self.values)

    def __add__(self, other: "FinSupFn") -> "FinSupFn":
        out = dict(self.values)
        for k, v in other.values.items():
            out[k] = out.get(k, 0) + v
        return FinSupFn(out)

    def scale(self, c) -> "FinSupFn":
        c = Fraction(c)
        if c <= 0:
            raise ValueError("scale factor must be positive")
        return FinSupFn({k: c * v for k, v in self.values.items()})

    def __eq__(self, other):
        return isinstance(other, FinSupFn) and self.values == other.values

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in self.values.items())
        return f"FinSupFn({{{body}}})"


@dataclass
class LevelSetRecord:
    lam: Fraction
    count: int
    members: list | None = None
    exact: bool = True
    note: str = ""


@dataclass
class WeakNormEstimate:
    lower_bound: Fraction
    attained_at_lambda: Fraction
    lambda_floor: Fraction
    curve: list  # (value point v, v * |{M >= v}|)
    divergence_exponent: float | None
    verdict: str
    exact: bool = True
    fit_residual: float | None = None
    counts: list = field(default_factory=list)


# -- pointwise evaluation -------------------------------------------------


def _require(f: FinSupFn) -> None:
    if not f:
        raise EmptyFunction("the function has empty support")


def hl_maximal_at(G: GraphOracle, f: FinSupFn, x, max_members: int = DEFAULT_MAX_MEMBERS) -> Fraction:
    """``max_r |B(x,r)|^-1 sum_{B(x,r)} f`` over r up to the support eccentricity."""
    _require(f)
    x = G.check(x)
    for y in f.support:
        G.check(y)
    remaining = set(f.support)
    mass = Fraction(0)
    size = 0
    best = Fraction(0)
    for layer in bfs_layers(G, [x], max_members=max_members):
        size += len(layer)
        for y in layer:
            if y in remaining:
                mass += f.values[y]
                remaining.discard(y)
        avg = mass / size
        if avg > best:
            best = avg
        if not remaining:
            return best
    raise ResourceLimit("support not reached")  # finite disconnected input


def delta_maximal_at(G: GraphOracle, x0, y) -> Fraction:
    """``M delta_{x0}(y) = 1 / |B(y, d(x0, y))|``."""
    x0, y = G.check(x0), G.check(y)
    size = 0
    for layer in bfs_layers(G, [y]):
        size += len(layer)
        if x0 in layer:
            return Fraction(1, size)
    raise ResourceLimit("vertex not reached")


def _scaled(f: FinSupFn):
    den = 1
    for v in f.values.values():
        den = den * v.denominator // math.gcd(den, v.denominator)
    weights = {k: int(v * den) for k, v in f.values.items()}
    return den, weights, sum(weights.values())


def maximal_values(G: GraphOracle, f: FinSupFn, vertices) -> list:
    """Exact ``M f`` on a list of vertices (compiled, falls back to Python)."""
    _require(f)
    vertices = [G.check(v) for v in vertices]
    den, weights, total = _scaled(f)
    eng = engine_for(G)
    if total >= _INT64_SAFE // eng.max_vertices:
        return [hl_maximal_at(G, f, v) for v in vertices]
    wid = {eng.index(G.check(k)): w for k, w in weights.items()}
    ids = [eng.index(v) for v in vertices]
    num, dd, _ = eng.best_averages(ids, [0] * len(ids), np.iinfo(np.int64).max, wid, total)
    return [Fraction(int(a), int(b) * den) for a, b in zip(num, dd)]


# -- superlevel sets ------------------------------------------------------


@dataclass
class _Scan:
    values: dict  # vertex -> M f(x), only for M f(x) > floor
    exact: bool
    note: str


def _scan(G: GraphOracle, f: FinSupFn, floor: Fraction, max_members: int) -> _Scan:
    """All vertices with ``M f > floor`` and their exact values."""
    _require(f)
    floor = Fraction(floor)
    if floor <= 0:
        raise ValueError("lambda must be positive")
    for y in f.support:
        G.check(y)
    den, weights, total = _scaled(f)
    eng = engine_for(G)
    if total >= _INT64_SAFE // eng.max_vertices:
        return _scan_python(G, f, floor, max_members)
    mass = f.total_mass
    ratio = mass / floor
    cap = -(-ratio.numerator // ratio.denominator)  # ceil: |B| >= cap iff |B| >= ratio
    # scaled comparison: num/(size*den) > floor  <=>  num*fd > size*den*fn
    fn, fd = floor.numerator, floor.denominator
    wid = {eng.index(k): w for k, w in weights.items()}
    frontier = sorted(wid)
    seen = set(frontier)
    out: dict = {}
    d = 0
    visited = 0
    exact, note = True, ""
    while frontier:
        visited += len(frontier)
        if visited > max_members:
            exact = False
            note = f"enumeration stopped after {max_members} vertices at distance {d}"
            break
        num, dd, at_d = eng.best_averages(frontier, [d] * len(frontier), cap, wid, total)
        keep = []
        for i, u in enumerate(frontier):
            a, b = int(num[i]), int(dd[i])
            if a * fd > b * den * fn:
                out[eng.key(u)] = Fraction(a, b * den)
            if 0 <= at_d[i] < cap:
                keep.append(u)
        nxt = set()
        for u in keep:
            for w in eng.neighbor_ids(u):
                if w not in seen:
                    seen.add(w)
                    nxt.add(w)
        frontier = sorted(nxt)
        d += 1
    return _Scan(dict(sorted(out.items())), exact, note)


def _scan_python(G, f, floor, max_members) -> _Scan:
    mass = f.total_mass
    out = {}
    layer_d = 0
    seen = set(f.support)
    frontier = sorted(seen)
    visited = 0
    while frontier:
        visited += len(frontier)
        if visited > max_members:
            return _Scan(dict(sorted(out.items())), False,
                         f"enumeration stopped after {max_members} vertices")
        keep = []
        for u in frontier:
            size = sum(len(layer) for layer in bfs_layers(G, [u], layer_d))
            if size < mass / floor:
                keep.append(u)
                m = hl_maximal_at(G, f, u)
                if m > floor:
                    out[u] = m
        nxt = set()
        for u in keep:
            for w in G.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    nxt.add(w)
        frontier = sorted(nxt)
        layer_d += 1
    return _Scan(dict(sorted(out.items())), True, "")


def superlevel_count(G: GraphOracle, f: FinSupFn, lam, max_members: int = DEFAULT_MAX_MEMBERS,
                     with_members: bool = False) -> LevelSetRecord:
    """Exact ``|{x : M f(x) > lam}|`` (a lower bound when ``exact`` is False)."""
    lam = Fraction(lam)
    scan = _scan(G, f, lam, max_members)
    members = sorted(scan.values) if with_members else None
    return LevelSetRecord(lam, len(scan.values), members, scan.exact, scan.note)


def weak_norm(G: GraphOracle, f: FinSupFn, lambda_floor, max_members: int = DEFAULT_MAX_MEMBERS,
              slope_threshold: float = -0.1, residual_tol: float = 0.05) -> WeakNormEstimate:
    """``sup_{lam >= floor} lam |{M f > lam}|`` evaluated at attained values.

    For a value point ``v`` the supremum over ``lam`` in ``[v', v)`` (``v'``
    the next smaller value) equals ``v |{M f >= v}|`` in the limit, so the
    maximum over value points above the floor is the exact restricted sup.
    """
    floor = Fraction(lambda_floor)
    if floor <= 0 or floor > f.total_mass:
        raise ValueError("lambda_floor must lie in (0, ||f||_1]")
    scan = _scan(G, f, floor, max_members)
    vals = sorted(scan.values.values(), reverse=True)
    curve, counts = [], []
    i = 0
    while i < len(vals):
        v = vals[i]
        j = i
        while j < len(vals) and vals[j] == v:
            j += 1
        curve.append((v, v * j))
        counts.append((v, j))
        i = j
    if not curve:
        return WeakNormEstimate(Fraction(0), floor, floor, [], None, "inconclusive", scan.exact)
    best_v, best = max(curve, key=lambda t: (t[1], -t[0]))
    slope, resid, verdict = _diagnose(curve, floor, slope_threshold, residual_tol)
    return WeakNormEstimate(best, best_v, floor, curve, slope, verdict, scan.exact, resid, counts)


def _diagnose(curve, floor, slope_threshold, residual_tol):
    lo = math.log(float(floor))
    hi = math.log(float(curve[0][0]))
    if hi - lo <= 0:
        return None, None, "inconclusive"
    mid = (lo + hi) / 2
    xs = np.array([math.log(float(v)) for v, _ in curve])
    ys = np.array([math.log(float(p)) for _, p in curve])
    low = xs <= mid
    slope = resid = None
    if low.sum() >= 3:
        A = np.vstack([xs[low], np.ones(low.sum())]).T
        coef, *_ = np.linalg.lstsq(A, ys[low], rcond=None)
        slope = float(coef[0])
        resid = float(np.sqrt(np.mean((A @ coef - ys[low]) ** 2)))
        if slope < slope_threshold and resid <= residual_tol:
            return slope, resid, "divergence_evidence"
    prods_low = [p for (v, p), m in zip(curve, low) if m]
    prods_high = [p for (v, p), m in zip(curve, low) if not m]
    if prods_low and prods_high and max(prods_low) <= max(prods_high):
        return slope, resid, "bounded_evidence"
    return slope, resid, "inconclusive"


def operator_norm_lb(G: GraphOracle, trials, lambda_floor, max_members: int = DEFAULT_MAX_MEMBERS) -> Fraction:
    """``max_f weak_norm(f) / ||f||_1`` over the trial functions."""
    trials = list(trials)
    if not trials:
        raise ValueError("no trial functions")
    best = Fraction(0)
    for f in trials:
        floor = min(Fraction(lambda_floor), f.total_mass)
        est = weak_norm(G, f, floor, max_members)
        best = max(best, est.lower_bound / f.total_mass)
    return best


def exact_weak_norm_finite(G: GraphOracle, f: FinSupFn) -> Fraction:
    """Exact ``sup_lam lam |{M f > lam}|`` on a finite graph."""
    if not G.is_finite:
        raise ValueError("finite graphs only")
    vals = sorted(maximal_values(G, f, G.vertices()), reverse=True)
    best = Fraction(0)
    for i, v in enumerate(vals):
        if v > 0:
            best = max(best, v * (i + 1))
    return best


# -- literals -------------------------------------------------------------

_DELTA = re.compile(r"^delta@\(?\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*,?\s*\)?$")


def parse_vertex(text: str) -> tuple:
    body = text.strip().strip("()").strip()
    if not body:
        raise ValueError(f"empty vertex literal {text!r}")
    return tuple(int(c) for c in body.split(",") if c.strip())


def parse_function(text: str, G: GraphOracle | None = None) -> FinSupFn:
    """``delta@(j,k)`` or a path to a file of ``vertex value`` lines."""
    m = _DELTA.match(text.strip())
    if m:
        v = parse_vertex(m.group(1))
        if G is not None:
            v = G.check(G.coerce(v[0]) if len(v) == 1 else v)
        return FinSupFn.delta(v)
    path = Path(text)
    if not path.exists():
        raise ValueError(f"not a function literal or file: {text!r}")
    values: dict = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        vtext, _, qtext = line.rpartition(" ")
        try:
            v = parse_vertex(vtext)
            q = Fraction(qtext)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{path}:{lineno}: expected 'vertex value', got {raw!r}") from None
        if G is not None:
            v = G.check(v)
        values[v] = values.get(v, 0) + q
    f = FinSupFn(values)
    _require(f)
    return f
