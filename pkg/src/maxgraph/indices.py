"""Dilation, doubling, ECP and degree indices; ball-cover overlap search.

Every estimate is the exact maximum of the defining ratio over a finite
window of centres and radii, hence a lower bound for the true supremum.
Ratios are maximized in floating point to find candidates and then
re-compared exactly, so reported values are exact rationals.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core_graph import GraphError, GraphOracle, ball, bfs_layers
from ._engine import EXHAUSTED, engine_for

EXACT_BALLS = 20


class HeuristicInconclusive(GraphError):
    """The greedy reduction failed; this is not a certificate of impossibility."""


@dataclass(frozen=True)
class Window:
    base: tuple
    radius: int
    members: tuple

    @classmethod
    def around(cls, G: GraphOracle, radius: int, base=None) -> "Window":
        base = G.origin if base is None else G.check(base)
        return cls(base, radius, ball(G, base, radius).members)

    @classmethod
    def of(cls, G: GraphOracle, vertices, base=None) -> "Window":
        """An explicit vertex list (radius recorded as -1)."""
        vs = tuple(sorted({G.check(v) for v in vertices}))
        return cls(base if base is not None else vs[0], -1, vs)

    def __len__(self):
        return len(self.members)


@dataclass
class IndexEstimate:
    index: str
    value: Fraction
    witness: dict
    window: Window
    r_max: int | None
    direction: str = "LowerBound"

    def summary(self) -> dict:
        return {"index": self.index, "value": self.value, "witness": self.witness,
                "window_base": self.window.base, "window_radius": self.window.radius,
                "window_size": len(self.window), "r_max": self.r_max,
                "direction": self.direction}


# -- ball size tables -----------------------------------------------------


def ball_size_table(G: GraphOracle, centers, R: int) -> np.ndarray:
    """``out[i, r] = |B(centers[i], r)|`` for ``0 <= r <= R``."""
    eng = engine_for(G)
    out = np.empty((len(centers), R + 1), np.int64)
    for i, x in enumerate(centers):
        p = eng.profile(x, R)
        c = np.cumsum(p.sizes)
        out[i, : c.shape[0]] = c
        if c.shape[0] < R + 1:  # finite graph exhausted
            out[i, c.shape[0]:] = c[-1]
    return out


def _argmax_ratio(num: np.ndarray, den: np.ndarray):
    """Exact argmax of ``num/den`` (flattened index, Fraction)."""
    q = num.astype(float) / den.astype(float)
    top = q.max()
    cand = np.flatnonzero(q >= top * (1 - 1e-12))
    best, arg = None, None
    for c in cand:
        v = Fraction(int(num.flat[c]), int(den.flat[c]))
        if best is None or v > best:
            best, arg = v, int(c)
    return arg, best


def dilation_lb(G: GraphOracle, k: int, window: Window, r_max: int) -> IndexEstimate:
    """``max |B(x,kr)| / |B(x,r)|`` over window centres and ``0 <= r <= r_max``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    xs = list(window.members)
    T = ball_size_table(G, xs, k * r_max)
    rs = np.arange(r_max + 1)
    arg, val = _argmax_ratio(T[:, k * rs], T[:, rs])
    i, r = divmod(arg, r_max + 1)
    return IndexEstimate(f"D{k}", val, {"x": xs[i], "r": int(r)}, window, r_max)


def doubling_K_lb(G: GraphOracle, window: Window, r_max) -> IndexEstimate:
    """Doubling ratio over half-integer radii ``1/2, 1, ..., r_max``.

    With ``r = n/2`` the ratio is ``|B(x, n)| / |B(x, floor(n/2))|``.
    """
    xs = list(window.members)
    n_max = int(2 * Fraction(r_max))
    T = ball_size_table(G, xs, n_max)
    ns = np.arange(1, n_max + 1)
    arg, val = _argmax_ratio(T[:, ns], T[:, ns // 2])
    i, j = divmod(arg, n_max)
    return IndexEstimate("K", val, {"x": xs[i], "r": Fraction(int(ns[j]), 2)}, window, r_max)


def ecp_lb(G: GraphOracle, window: Window) -> IndexEstimate:
    """``max |B(x,d)| / |B(y,d)|`` over ordered pairs at distance ``d = d(x,y)``."""
    xs = list(window.members)
    if len(xs) < 2:
        raise ValueError("window needs at least two vertices")
    eng = engine_for(G)
    pos = {eng.index(v): i for i, v in enumerate(xs)}
    n = len(xs)
    dist = np.full((n, n), -1, np.int64)
    for i, x in enumerate(xs):
        # graph distance, not distance inside the window
        p = _profile_until(eng, x, pos, n)
        layer = np.repeat(np.arange(p.sizes.shape[0]), p.sizes)
        for u, d in zip(p.order.tolist(), layer.tolist()):
            j = pos.get(u)
            if j is not None:
                dist[i, j] = d
    if (dist < 0).any():
        raise GraphError("window is not connected within the explored radius")
    D = int(dist.max())
    T = ball_size_table(G, xs, D)
    rows = np.repeat(np.arange(n), n).reshape(n, n)
    num = T[rows, dist]
    den = T[rows.T, dist]
    arg, val = _argmax_ratio(num, den)
    i, j = divmod(arg, n)
    return IndexEstimate("ECP", val, {"x": xs[i], "y": xs[j], "d": int(dist[i, j])}, window, None)


def _profile_until(eng, x, pos, n):
    R = 4
    while True:
        p = eng.profile(x, R)
        if sum(1 for u in p.order.tolist() if u in pos) == n or p.status == EXHAUSTED:
            return p
        R *= 2


def max_degree_lb(G: GraphOracle, window: Window) -> IndexEstimate:
    best, arg = -1, None
    for v in window.members:
        d = len(G.neighbors(v))
        if d > best:
            best, arg = d, v
    return IndexEstimate("MaxDegree", Fraction(best), {"x": arg}, window, None)


# -- escalation evidence ---------------------------------------------------


@dataclass
class Escalation:
    """Values of an index along an escape sequence of windows."""

    label: str
    steps: list
    values: list
    threshold: Fraction
    min_steps: int = 4

    @property
    def strictly_increasing(self) -> bool:
        return all(a < b for a, b in zip(self.values, self.values[1:]))

    @property
    def exceeds(self) -> bool:
        return bool(self.values) and self.values[-1] > self.threshold

    @property
    def unbounded_evidence(self) -> bool:
        return len(self.values) >= self.min_steps and self.strictly_increasing and self.exceeds


def escalate(label: str, measure, steps, threshold) -> Escalation:
    steps = list(steps)
    return Escalation(label, steps, [Fraction(measure(s)) for s in steps], Fraction(threshold))


# -- ball families and overlap ---------------------------------------------


@dataclass
class BallFamily:
    balls: list  # (center, radius)
    materialized: list  # frozenset of members per ball

    @classmethod
    def of(cls, G: GraphOracle, balls) -> "BallFamily":
        spec = [(G.check(c), int(r)) for c, r in balls]
        if not spec:
            raise ValueError("empty ball family")
        return cls(spec, [frozenset(ball(G, c, r).members) for c, r in spec])

    def __len__(self):
        return len(self.balls)

    def union(self) -> frozenset:
        return frozenset().union(*self.materialized)


@dataclass
class OverlapCertificate:
    family: BallFamily
    min_overlap: int
    minimizing_subfamily: tuple
    private_points: dict | None
    exact: bool = True


class _Incidence:
    """Element/ball incidence as bitmasks (balls as bits, elements as bits)."""

    def __init__(self, family: BallFamily):
        self.elements = sorted(family.union())
        idx = {v: i for i, v in enumerate(self.elements)}
        self.nb = len(family)
        self.ball_masks = []
        inc = [0] * len(self.elements)
        for b, members in enumerate(family.materialized):
            m = 0
            for v in members:
                m |= 1 << idx[v]
                inc[idx[v]] |= 1 << b
            self.ball_masks.append(m)
        self.full = (1 << len(self.elements)) - 1
        self.inc = inc
        self._inc_arr = np.array(inc, dtype=np.uint64) if self.nb <= 63 else None

    def covers(self, subset) -> bool:
        m = 0
        for b in subset:
            m |= self.ball_masks[b]
        return m == self.full

    def overlap(self, subset) -> int:
        s = 0
        for b in subset:
            s |= 1 << b
        if self._inc_arr is not None:
            return int(np.bitwise_count(self._inc_arr & np.uint64(s)).max())
        return max(bin(e & s).count("1") for e in self.inc)

    def private_points(self) -> dict:
        out = {}
        for e, m in zip(self.elements, self.inc):
            if m & (m - 1) == 0:
                b = m.bit_length() - 1
                if b not in out:
                    out[b] = e  # elements are sorted: lexicographically smallest
        return out


def private_points_of(family: BallFamily) -> dict:
    """Ball index -> smallest vertex lying in that ball only."""
    return _Incidence(family).private_points()


def cover_reduce(family: BallFamily, m: int, forced=()):
    """Union-preserving subfamily with pointwise overlap at most ``m``.

    Exact for up to 20 balls: subsets by increasing size, then lexicographic,
    with balls holding private points always included.  Returns ``None`` when
    no subfamily exists.  Larger families use greedy removal and raise
    :class:`HeuristicInconclusive` if it fails.
    """
    inc = _Incidence(family)
    n = len(family)
    must = set(forced) | set(inc.private_points())
    if len(family) > EXACT_BALLS:
        return _greedy(inc, m, must)
    if inc.overlap(sorted(must)) > m:
        return None
    rest = [b for b in range(n) if b not in must]
    base = sorted(must)
    for size in range(0, len(rest) + 1):
        for extra in itertools.combinations(rest, size):
            sub = sorted(base + list(extra))
            if inc.covers(sub) and inc.overlap(sub) <= m:
                return tuple(sub)
    return None


def _greedy(inc: _Incidence, m: int, must) -> tuple:
    keep = set(range(inc.nb))
    changed = True
    while inc.overlap(sorted(keep)) > m and changed:
        changed = False
        for b in sorted(keep - must, key=lambda b: -bin(inc.ball_masks[b]).count("1")):
            trial = keep - {b}
            if inc.covers(trial):
                keep = trial
                changed = True
                break
    if inc.overlap(sorted(keep)) <= m:
        return tuple(sorted(keep))
    raise HeuristicInconclusive(f"greedy removal stuck at overlap {inc.overlap(sorted(keep))}")


def overlap_certificate(G: GraphOracle, family: BallFamily) -> OverlapCertificate:
    """Least overlap over union-preserving subfamilies of ``family``.

    When every ball has a private point no ball can be dropped, so the full
    family is the only candidate and any number of balls is accepted.
    """
    inc = _Incidence(family)
    n = len(family)
    priv = inc.private_points()
    everything = tuple(range(n))
    if len(priv) == n:
        return OverlapCertificate(family, inc.overlap(everything), everything, priv)
    if n > EXACT_BALLS:
        raise HeuristicInconclusive("exact overlap search is limited to 20 balls")
    lo = inc.overlap(sorted(priv)) if priv else 1
    for m in range(max(lo, 1), inc.overlap(everything) + 1):
        sub = cover_reduce(family, m)
        if sub is not None:
            return OverlapCertificate(family, inc.overlap(sub), sub, None)
    raise AssertionError("the full family always qualifies")


def all_balls(G: GraphOracle) -> list:
    """Distinct balls of a finite graph as ``(center, radius, members)``."""
    seen = {}
    for v in G.vertices():
        members = []
        for r, layer in enumerate(bfs_layers(G, [v])):
            members.extend(layer)
            key = frozenset(members)
            if key not in seen:
                seen[key] = (v, r)
    return [(c, r, s) for s, (c, r) in sorted(seen.items(), key=lambda t: t[1])]


def finite_overlap_index(G: GraphOracle) -> tuple:
    """Exact O(G) of a finite graph and a witness family.

    O(G) equals the largest family of distinct balls with a common point in
    which every ball owns a private point: such a family admits no proper
    union-preserving subfamily, and every family contains one.
    """
    balls = all_balls(G)
    verts = G.vertices()
    vid = {v: i for i, v in enumerate(verts)}
    masks = []
    for _, _, s in balls:
        m = 0
        for v in s:
            m |= 1 << vid[v]
        masks.append(m)
    best, witness = 0, ()
    for x in verts:
        bit = 1 << vid[x]
        cand = [i for i, m in enumerate(masks) if m & bit]
        size, fam = _max_irredundant([masks[i] for i in cand])
        if size > best:
            best, witness = size, tuple((balls[cand[i]][0], balls[cand[i]][1]) for i in fam)
    return best, witness


def _max_irredundant(masks: list) -> tuple:
    """Largest subfamily whose members all have a private element."""
    n = len(masks)
    best = [0, ()]

    def rec(i, chosen, privs, union):
        if len(chosen) + (n - i) <= best[0]:
            return
        if i == n:
            best[0], best[1] = len(chosen), tuple(chosen)
            return
        m = masks[i]
        own = m & ~union
        new_privs = [p & ~m for p in privs]
        if own and all(new_privs):
            rec(i + 1, chosen + [i], new_privs + [own], union | m)
        rec(i + 1, chosen, privs, union)

    rec(0, [], [], 0)
    return best[0], best[1]


# -- literals ---------------------------------------------------------------

_BALL = re.compile(r"^\(\s*\(([^()]*)\)\s*,\s*(\d+)\s*\)$")


def parse_ball_family(text: str) -> list:
    """``((3,1),2);((4,0),1)`` -> ``[((3, 1), 2), ((4, 0), 1)]``."""
    out = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        m = _BALL.match(item)
        if not m:
            raise ValueError(f"malformed ball literal {item!r}")
        coords = tuple(int(c) for c in m.group(1).split(",") if c.strip())
        out.append((coords, int(m.group(2))))
    if not out:
        raise ValueError("empty ball family literal")
    return out


def telescoping_exponent(k: int, k2: int) -> int:
    """Least ``p`` with ``k**p >= k2``."""
    p = 1
    while k**p < k2:
        p += 1
    return p


def floor_log_exponent(k: int, k2: int) -> int:
    """``floor(log k2 / log k) + 1`` computed in integers."""
    p = 0
    while k ** (p + 1) <= k2:
        p += 1
    return p + 1


__all__ = [
    "BallFamily", "Escalation", "HeuristicInconclusive", "IndexEstimate", "OverlapCertificate",
    "Window", "all_balls", "ball_size_table", "cover_reduce", "dilation_lb", "doubling_K_lb",
    "ecp_lb", "escalate", "finite_overlap_index", "floor_log_exponent", "max_degree_lb",
    "overlap_certificate", "parse_ball_family", "private_points_of", "telescoping_exponent",
]
