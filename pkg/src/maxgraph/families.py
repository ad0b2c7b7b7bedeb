"""Graph families as oracles, plus their closed-form ball formulas.

Infinite families:

* ``oplus_complete``   complete graphs K_1, K_2, ... glued in a chain at cut
  vertices; vertices ``(m, n)`` with ``m >= 2``, ``1 <= n <= m-1``.
* ``shifted_oplus_complete``  a spine ``(m, 0)`` with a complete graph K_m on
  ``(m, 1..m)`` hanging from each spine vertex through ``(m, 1)``.
* ``regular_tree``     the infinite k-regular tree, keyed ``(depth, index)``.
* ``comb``             the integer line with an infinite tooth at every point.
* ``steplike_dyadic``  the half-line with a tooth of height 2^n at 2^n.

Finite families (single-coordinate keys): complete, star, linear, cycle and
user edge lists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from functools import lru_cache

from numba import njit

from .core_graph import GraphError, GraphOracle, UnknownVertex, ball
from ._engine import engine_for
from ._native import Codec

KINDS = (
    "complete", "star", "linear", "cycle", "oplus_complete",
    "shifted_oplus_complete", "regular_tree", "comb", "steplike_dyadic", "edge_list",
)


class InvalidSpec(GraphError, ValueError):
    pass


class ParseError(GraphError, ValueError):
    pass


class SelfLoop(ParseError):
    pass


class Disconnected(GraphError, ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    params: dict = field(default_factory=dict)
    source_path: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown family kind {self.kind!r}")
        object.__setattr__(self, "params", dict(self.params))
        _validate(self)

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items())), self.source_path))

    def label(self) -> str:
        alias = _LABELS[self.kind]
        if self.kind == "edge_list":
            return f"edgelist:path={self.source_path}"
        if self.params:
            args = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
            return f"{alias}:{args}"
        return alias


def _validate(spec: FamilySpec) -> None:
    p = spec.params
    need = {"complete": ("n", 1), "star": ("n", 2), "linear": ("n", 1),
            "cycle": ("n", 3), "regular_tree": ("k", 2)}
    if spec.kind in need:
        name, lo = need[spec.kind]
        if set(p) != {name}:
            raise InvalidSpec(f"{spec.kind} takes exactly the parameter {name!r}")
        if not isinstance(p[name], int) or p[name] < lo:
            raise InvalidSpec(f"{spec.kind} requires {name} >= {lo}")
    elif spec.kind == "edge_list":
        if not spec.source_path or p:
            raise InvalidSpec("edge_list needs a source path and no parameters")
    elif p:
        raise InvalidSpec(f"{spec.kind} takes no parameters")


_ALIASES = {
    "complete": "complete", "star": "star", "linear": "linear", "cycle": "cycle",
    "oplusK": "oplus_complete", "shiftK": "shifted_oplus_complete",
    "tree": "regular_tree", "comb": "comb", "dyadic": "steplike_dyadic",
    "edgelist": "edge_list",
}
_LABELS = {kind: alias for alias, kind in _ALIASES.items()}


def parse_family(text: str) -> FamilySpec:
    """Parse CLI strings such as ``tree:k=3``, ``comb`` or ``edgelist:path=g.txt``."""
    name, _, rest = text.strip().partition(":")
    kind = _ALIASES.get(name, name)
    if kind not in KINDS:
        raise InvalidSpec(f"unknown family {name!r}")
    params, path = {}, None
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise InvalidSpec(f"malformed family parameter {item!r}")
            if key == "path":
                path = val
            else:
                try:
                    params[key] = int(val)
                except ValueError:
                    raise InvalidSpec(f"parameter {key} must be an integer") from None
    return FamilySpec(kind, params, path)


# -- finite families ------------------------------------------------------


class _Finite(GraphOracle):
    is_finite = True
    origin = (0,)

    def __init__(self, n: int):
        self.n = n

    def contains(self, v) -> bool:
        return len(v) == 1 and isinstance(v[0], int) and 0 <= v[0] < self.n

    def vertices(self) -> list:
        return [(i,) for i in range(self.n)]

    def neighbors(self, v) -> list:
        v = self.check(v)
        return [(i,) for i in self._nb(v[0])]


class CompleteGraph(_Finite):
    def __init__(self, n):
        super().__init__(n)
        self.name = f"K_{n}"

    def _nb(self, i):
        return [j for j in range(self.n) if j != i]


class StarGraph(_Finite):
    """Centre 0, leaves 1..n-1."""

    def __init__(self, n):
        super().__init__(n)
        self.name = f"S_{n}"

    def _nb(self, i):
        return list(range(1, self.n)) if i == 0 else [0]


class LinearGraph(_Finite):
    def __init__(self, n):
        super().__init__(n)
        self.name = f"L_{n}"

    def _nb(self, i):
        return [j for j in (i - 1, i + 1) if 0 <= j < self.n]


class CycleGraph(_Finite):
    def __init__(self, n):
        super().__init__(n)
        self.name = f"C_{n}"

    def _nb(self, i):
        return sorted({(i - 1) % self.n, (i + 1) % self.n})


class EdgeListGraph(GraphOracle):
    is_finite = True

    def __init__(self, adjacency: dict, name: str = "edgelist"):
        self._adj = {(u,): [(w,) for w in sorted(ws)] for u, ws in adjacency.items()}
        self.name = name
        self.origin = min(self._adj)

    def contains(self, v) -> bool:
        return v in self._adj

    def vertices(self) -> list:
        return sorted(self._adj)

    def neighbors(self, v) -> list:
        try:
            return list(self._adj[v])
        except (KeyError, TypeError):
            raise UnknownVertex(f"{v!r} is not a vertex of {self.name}") from None


def load_edge_list(path) -> EdgeListGraph:
    """Read ``u v`` lines (``#`` comments allowed) into a finite oracle."""
    adjacency: dict = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(re.fullmatch(r"\d+", p) for p in parts):
            raise ParseError(f"{path}:{lineno}: expected two nonnegative integers, got {raw!r}")
        u, w = int(parts[0]), int(parts[1])
        if u == w:
            raise SelfLoop(f"{path}:{lineno}: self-loop at vertex {u}")
        adjacency.setdefault(u, set()).add(w)
        adjacency.setdefault(w, set()).add(u)
    if not adjacency:
        raise ParseError(f"{path}: no edges")
    G = EdgeListGraph(adjacency, name=f"edgelist:{Path(path).name}")
    reached = ball(G, G.origin, len(adjacency)).size
    if reached != len(adjacency):
        raise Disconnected(
            f"{path}: only {reached} of {len(adjacency)} vertices reachable from {G.origin[0]}")
    return G


# -- infinite families ----------------------------------------------------


class _Pairs(GraphOracle):
    is_finite = False

    def contains(self, v) -> bool:
        return (isinstance(v, tuple) and len(v) == 2
                and all(isinstance(c, int) for c in v) and self._valid(*v))


class OplusComplete(_Pairs):
    """Chain of complete graphs K_1, K_2, ... sharing cut vertices.

    Vertex ``(m, n)`` with ``1 <= n < m``.  Block ``m`` is a clique, every
    vertex of block ``m`` is joined to ``(m+1, 1)``, so ``(m, 1)`` is the cut
    vertex between the cliques K_{m-1} and K_m.
    """

    name = "oplusK"
    origin = (2, 1)

    def _valid(self, m, n):
        return m >= 2 and 1 <= n <= m - 1

    def neighbors(self, v):
        m, n = self.check(v)
        out = []
        if n == 1 and m >= 3:
            out.extend((m - 1, i) for i in range(1, m - 1))
        out.extend((m, i) for i in range(1, m) if i != n)
        out.append((m + 1, 1))
        return out

    def codec(self) -> Codec:
        return Codec(_oplus_nbr, 1 << 20, lambda v: _pack(*v), _unpack)

    @staticmethod
    def block_index(v) -> int:
        """Index j of the clique K_j holding ``v`` (the smaller one for cut vertices)."""
        m, n = v
        return m - 1 if n == 1 else m


class ShiftedOplusComplete(_Pairs):
    """Spine ``(m, 0)``, ``m >= 2``; ``(m, 1..m)`` is a K_m attached at ``(m, 1)``."""

    name = "shiftK"
    origin = (2, 0)

    def _valid(self, m, n):
        return m >= 2 and 0 <= n <= m

    def neighbors(self, v):
        m, n = self.check(v)
        if n == 0:
            out = [(m - 1, 0)] if m >= 3 else []
            out.extend([(m, 1), (m + 1, 0)])
            return sorted(out)
        out = [(m, 0)] if n == 1 else []
        out.extend((m, i) for i in range(1, m + 1) if i != n)
        return out

    def codec(self) -> Codec:
        return Codec(_shift_nbr, 1 << 20, lambda v: _pack(*v), _unpack)


class RegularTree(_Pairs):
    """The infinite k-regular tree.

    Vertices are ``(depth, index)`` relative to a root ``(0, 0)``: the root
    has children ``(1, 0..k-1)`` and ``(d, i)`` with ``d >= 1`` has children
    ``(d+1, i*(k-1) + c)`` for ``c < k-1``.  A bare integer passed to
    :meth:`coerce` is read as a breadth-first vertex number (0 is the root).
    """

    origin = (0, 0)

    def __init__(self, k: int):
        if k < 2:
            raise InvalidSpec("regular tree needs k >= 2")
        self.k = k
        self.name = f"T_{k}"

    def layer_size(self, d: int) -> int:
        return 1 if d == 0 else self.k * (self.k - 1) ** (d - 1)

    def _valid(self, d, i):
        return d >= 0 and 0 <= i < self.layer_size(d)

    def coerce(self, v):
        if isinstance(v, int) or (isinstance(v, tuple) and len(v) == 1):
            n = v if isinstance(v, int) else v[0]
            if n < 0:
                return (n,)
            d = 0
            while n >= self.layer_size(d):
                n -= self.layer_size(d)
                d += 1
            return (d, n)
        return super().coerce(v)

    def vertex_number(self, v) -> int:
        d, i = v
        return sum(self.layer_size(e) for e in range(d)) + i

    def codec(self) -> Codec:
        return Codec(_tree_nbr(self.k), self.k, self.vertex_number, self.coerce)

    def parent(self, v):
        d, i = v
        if d == 0:
            return None
        return (0, 0) if d == 1 else (d - 1, i // (self.k - 1))

    def neighbors(self, v):
        d, i = self.check(v)
        k = self.k
        if d == 0:
            return [(1, c) for c in range(k)]
        kids = [(d + 1, i * (k - 1) + c) for c in range(k - 1)]
        return [self.parent((d, i))] + kids


class Comb(_Pairs):
    """Teeth ``(j, k)``, ``k >= 0``, hanging from the spine ``(j, 0)``, ``j`` in Z."""

    name = "comb"
    origin = (0, 0)

    def _valid(self, j, k):
        return k >= 0

    def neighbors(self, v):
        j, k = self.check(v)
        if k == 0:
            return [(j - 1, 0), (j, 1), (j + 1, 0)]
        return [(j, k - 1), (j, k + 1)]

    def codec(self) -> Codec:
        return Codec(_comb_nbr, 3, lambda v: _pack(_zig(v[0]), v[1]),
                     lambda u: (_unzig(u >> 31), u & _LOW))


class SteplikeDyadic(_Pairs):
    """Half-line ``(j, 0)``, ``j >= 1``, with a tooth ``(2^n, 1..2^n)`` at each 2^n, ``n >= 1``."""

    name = "dyadic"
    origin = (1, 0)

    @staticmethod
    def _is_tower(j):
        return j >= 2 and j & (j - 1) == 0

    def _valid(self, j, k):
        if j < 1 or k < 0:
            return False
        return k == 0 or (self._is_tower(j) and k <= j)

    def neighbors(self, v):
        j, k = self.check(v)
        if k == 0:
            out = [(j - 1, 0)] if j >= 2 else []
            if self._is_tower(j):
                out.append((j, 1))
            out.append((j + 1, 0))
            return sorted(out)
        out = [(j, k - 1)]
        if k < j:
            out.append((j, k + 1))
        return out

    def codec(self) -> Codec:
        return Codec(_dyadic_nbr, 3, lambda v: _pack(*v), _unpack)


# -- integer codecs for the compiled BFS ----------------------------------
# Pairs are packed as (first << 31) | second; signed first coordinates are
# zigzag-encoded.  Each codec mirrors the matching ``neighbors`` exactly.

_LOW = (1 << 31) - 1


def _pack(a: int, b: int) -> int:
    if not (0 <= a <= _LOW and 0 <= b <= _LOW):
        raise ValueError("coordinates outside the codec range")
    return (a << 31) | b


def _unpack(u: int) -> tuple:
    return u >> 31, u & _LOW


@njit(cache=True)
def _comb_nbr(u, out):
    z = u >> 31
    k = u & 2147483647
    j = (z >> 1) ^ -(z & 1)
    if k == 0:
        jm = j - 1
        jp = j + 1
        out[0] = ((jm << 1) ^ (jm >> 63)) << 31
        out[1] = u + 1
        out[2] = ((jp << 1) ^ (jp >> 63)) << 31
        return 3
    out[0] = u - 1
    out[1] = u + 1
    return 2


@njit(cache=True)
def _oplus_nbr(u, out):
    m = u >> 31
    n = u & 2147483647
    c = 0
    if n == 1 and m >= 3:
        for i in range(1, m - 1):
            out[c] = ((m - 1) << 31) | i
            c += 1
    for i in range(1, m):
        if i != n:
            out[c] = (m << 31) | i
            c += 1
    out[c] = ((m + 1) << 31) | 1
    return c + 1


@njit(cache=True)
def _shift_nbr(u, out):
    m = u >> 31
    n = u & 2147483647
    c = 0
    if n == 0:
        if m >= 3:
            out[c] = (m - 1) << 31
            c += 1
        out[c] = (m << 31) | 1
        out[c + 1] = (m + 1) << 31
        return c + 2
    if n == 1:
        out[c] = m << 31
        c += 1
    for i in range(1, m + 1):
        if i != n:
            out[c] = (m << 31) | i
            c += 1
    return c


@njit(cache=True)
def _dyadic_nbr(u, out):
    j = u >> 31
    k = u & 2147483647
    c = 0
    if k == 0:
        if j >= 2:
            out[c] = (j - 1) << 31
            c += 1
        if j >= 2 and (j & (j - 1)) == 0:
            out[c] = (j << 31) | 1
            c += 1
        out[c] = (j + 1) << 31
        return c + 1
    out[c] = u - 1
    c += 1
    if k < j:
        out[c] = u + 1
        c += 1
    return c


@lru_cache(maxsize=None)
def _tree_nbr(k: int):
    @njit
    def nbr(u, out):
        if u == 0:
            for c in range(k):
                out[c] = 1 + c
            return k
        out[0] = 0 if u <= k else (u - k - 1) // (k - 1) + 1
        base = k + (u - 1) * (k - 1) + 1
        for c in range(k - 1):
            out[1 + c] = base + c
        return k
    return nbr


def _zig(j: int) -> int:
    return 2 * j if j >= 0 else -2 * j - 1


def _unzig(z: int) -> int:
    return z >> 1 if z % 2 == 0 else -((z + 1) >> 1)



def build(spec: FamilySpec) -> GraphOracle:
    """Construct the oracle for ``spec``."""
    kind, p = spec.kind, spec.params
    if kind == "complete":
        return CompleteGraph(p["n"])
    if kind == "star":
        return StarGraph(p["n"])
    if kind == "linear":
        return LinearGraph(p["n"])
    if kind == "cycle":
        return CycleGraph(p["n"])
    if kind == "regular_tree":
        return RegularTree(p["k"])
    if kind == "oplus_complete":
        return OplusComplete()
    if kind == "shifted_oplus_complete":
        return ShiftedOplusComplete()
    if kind == "comb":
        return Comb()
    if kind == "steplike_dyadic":
        return SteplikeDyadic()
    return load_edge_list(spec.source_path)


def spec_of(G: GraphOracle) -> FamilySpec:
    """Recover the spec of an oracle built by :func:`build`."""
    table = {CompleteGraph: "complete", StarGraph: "star", LinearGraph: "linear",
             CycleGraph: "cycle"}
    for cls, kind in table.items():
        if type(G) is cls:
            return FamilySpec(kind, {"n": G.n})
    if isinstance(G, RegularTree):
        return FamilySpec("regular_tree", {"k": G.k})
    simple = {OplusComplete: "oplus_complete", ShiftedOplusComplete: "shifted_oplus_complete",
              Comb: "comb", SteplikeDyadic: "steplike_dyadic"}
    if type(G) in simple:
        return FamilySpec(simple[type(G)])
    raise InvalidSpec(f"no family spec for {G!r}")


# -- closed forms ---------------------------------------------------------


def closed_form_ball_size(spec: FamilySpec, v, r: int):
    """|B(v, r)| from a closed formula, or ``None`` where none is available."""
    kind, p = spec.kind, spec.params
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if kind == "regular_tree":
        k = p["k"]
        if k == 2:
            return 2 * r + 1
        return 1 + k * ((k - 1) ** r - 1) // (k - 2)
    if kind == "comb":
        _, t = v
        return 2 * r + 1 if r < t else (r - t + 1) ** 2 + 2 * t
    if kind == "complete":
        return 1 if r == 0 else p["n"]
    if kind == "star":
        n, i = p["n"], v[0]
        if r == 0:
            return 1
        if i == 0 or r >= 2:
            return n
        return 2
    if kind == "linear":
        n, i = p["n"], v[0]
        return min(i + r, n - 1) - max(i - r, 0) + 1
    if kind == "cycle":
        return min(2 * r + 1, p["n"])
    return None


def closed_form_sphere_sup(spec: FamilySpec, r: int):
    """sup_x |S(x, r)| where a formula is known, else ``None``."""
    if r == 0:
        return 1
    kind, p = spec.kind, spec.params
    if kind == "regular_tree":
        k = p["k"]
        return k * (k - 1) ** (r - 1)
    if kind == "comb":
        # attained on the spine: (r+1)^2 - r^2
        return 2 * r + 1
    if kind == "complete":
        return p["n"] - 1 if r == 1 else 0
    return None


def closed_form_degree(spec: FamilySpec, v):
    kind = spec.kind
    if kind == "regular_tree":
        return spec.params["k"]
    if kind == "comb":
        return 3 if v[1] == 0 else 2
    if kind == "oplus_complete":
        m, n = v
        return 2 * m - 3 if n == 1 else m - 1
    if kind == "shifted_oplus_complete":
        m, n = v
        if n == 0:
            return 2 if m == 2 else 3
        return m if n == 1 else m - 1
    if kind == "steplike_dyadic":
        j, k = v
        if k == 0:
            spine = 1 if j == 1 else 2
            return spine + (1 if SteplikeDyadic._is_tower(j) else 0)
        return 1 if k == j else 2
    if kind == "complete":
        return spec.params["n"] - 1
    return None


@dataclass(frozen=True)
class ClosedForm:
    family: FamilySpec

    def ball_size(self, v, r):
        return closed_form_ball_size(self.family, v, r)

    def sphere_sup(self, r):
        return closed_form_sphere_sup(self.family, r)

    def degree(self, v):
        return closed_form_degree(self.family, v)


def interval_bounds(spec: FamilySpec, v, r: int) -> tuple:
    """Stated interval ``(lo, hi)`` for |B(v, r)|, r >= 1."""
    if r < 1:
        raise ValueError("interval bounds need r >= 1")
    if spec.kind == "oplus_complete":
        j = OplusComplete.block_index(v)
        if j >= r:
            return Fraction(j * r, 2), Fraction(6 * j * r)
        return Fraction(r * r, 2), Fraction(6 * r * r)
    if spec.kind == "steplike_dyadic":
        return Fraction(r), Fraction(24 * r)
    raise InvalidSpec(f"no interval bounds for {spec.kind}")


def check_interval_bounds(spec: FamilySpec, v, r: int, G: GraphOracle | None = None) -> bool:
    """Whether the BFS ball size lies in :func:`interval_bounds`."""
    if spec.kind not in ("oplus_complete", "steplike_dyadic"):
        raise InvalidSpec(f"no interval bounds for {spec.kind}")
    G = G or build(spec)
    lo, hi = interval_bounds(spec, v, r)
    size = engine_for(G).ball_size(G.check(v), r)
    return lo <= size <= hi
