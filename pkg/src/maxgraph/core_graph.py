"""Vertex identity, the graph-oracle contract, and exact BFS geometry.

Graphs here may be infinite, so nothing is ever materialized as a matrix.
Every geometric query is answered by a layered breadth-first search over
the oracle's neighbour lists.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

VertexKey = tuple  # tuple[int, ...]; family-specific meaning

DEFAULT_MAX_MEMBERS = 10**6
DEFAULT_MAX_RADIUS = 10**4


class GraphError(Exception):
    """Base class for errors raised by this package."""


class UnknownVertex(GraphError, KeyError):
    pass


class ResourceLimit(GraphError):
    pass


class EmptySet(GraphError, ValueError):
    pass


@dataclass(frozen=True)
class Unreachable:
    """Returned by :func:`distance` when the target lies beyond ``cap``."""

    cap: int

    def __bool__(self) -> bool:
        return False


class GraphOracle(ABC):
    """Adjacency interface for a simple, connected, locally finite graph.

    Subclasses must return neighbour lists in ascending key order, without
    duplicates and without the vertex itself.  Oracles are required to be
    pure: repeated calls give identical answers, from any thread.
    """

    name: str = "graph"
    is_finite: bool = False
    origin: VertexKey = (0,)

    @abstractmethod
    def contains(self, v: VertexKey) -> bool: ...

    @abstractmethod
    def neighbors(self, v: VertexKey) -> list: ...

    def vertices(self) -> list:
        """All vertices, sorted.  Finite oracles only."""
        if not self.is_finite:
            raise ResourceLimit(f"{self.name} is infinite; cannot list vertices")
        return sorted(ball(self, self.origin, DEFAULT_MAX_RADIUS).members)

    def coerce(self, v) -> VertexKey:
        """Normalize user input (an int or a sequence of ints) to a key."""
        if isinstance(v, int):
            return (v,)
        return tuple(int(c) for c in v)

    def degree(self, v: VertexKey) -> int:
        return len(self.neighbors(self.check(v)))

    def check(self, v) -> VertexKey:
        v = self.coerce(v)
        if not self.contains(v):
            raise UnknownVertex(f"{v!r} is not a vertex of {self.name}")
        return v

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


@dataclass(frozen=True)
class BallRecord:
    center: VertexKey
    radius: int
    members: tuple
    layer_sizes: tuple

    @property
    def size(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v) -> bool:
        return v in self._member_set

    @property
    def _member_set(self) -> frozenset:
        s = self.__dict__.get("_ms")
        if s is None:
            s = frozenset(self.members)
            object.__setattr__(self, "_ms", s)
        return s


def bfs_layers(
    G: GraphOracle,
    sources: Iterable[VertexKey],
    max_radius: int = DEFAULT_MAX_RADIUS,
    max_members: int = DEFAULT_MAX_MEMBERS,
) -> Iterator[list]:
    """Yield the BFS layers ``S(sources, 0), S(sources, 1), ...``.

    Each layer is a sorted list.  Iteration stops after ``max_radius`` or when
    the graph is exhausted; :class:`ResourceLimit` is raised once more than
    ``max_members`` vertices have been produced.
    """
    layer = sorted({G.check(s) for s in sources})
    if not layer:
        raise EmptySet("no BFS sources")
    seen = set(layer)
    total = len(layer)
    r = 0
    while layer:
        yield layer
        if r >= max_radius:
            return
        nxt = set()
        for u in layer:
            for w in G.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    nxt.add(w)
        total += len(nxt)
        if total > max_members:
            raise ResourceLimit(
                f"BFS in {G.name} exceeded {max_members} vertices at radius {r + 1}"
            )
        layer = sorted(nxt)
        r += 1


def ball(
    G: GraphOracle,
    x: VertexKey,
    r: int,
    max_members: int = DEFAULT_MAX_MEMBERS,
) -> BallRecord:
    """The closed ball B(x, r) with its sphere sizes, by layered BFS."""
    x = G.check(x)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    members: list = []
    sizes: list = []
    for layer in bfs_layers(G, [x], r, max_members):
        members.extend(layer)
        sizes.append(len(layer))
    # finite graphs: radii past the eccentricity add empty spheres
    sizes.extend([0] * (r + 1 - len(sizes)))
    return BallRecord(x, r, tuple(sorted(members)), tuple(sizes))


def sphere(G: GraphOracle, x: VertexKey, r: int, max_members: int = DEFAULT_MAX_MEMBERS) -> list:
    """Sorted list of vertices at distance exactly ``r`` from ``x``."""
    x = G.check(x)
    for i, layer in enumerate(bfs_layers(G, [x], r, max_members)):
        if i == r:
            return layer
    return []


def distance(G: GraphOracle, x: VertexKey, y: VertexKey, cap: int = DEFAULT_MAX_RADIUS):
    """Graph distance, or :class:`Unreachable` if it exceeds ``cap``."""
    x, y = G.check(x), G.check(y)
    for i, layer in enumerate(bfs_layers(G, [x], cap)):
        if y in layer:
            return i
    return Unreachable(cap)


def distances_from(G: GraphOracle, x: VertexKey, r: int) -> dict:
    """Map every vertex of B(x, r) to its distance from ``x``."""
    out = {}
    for i, layer in enumerate(bfs_layers(G, [x], r)):
        for v in layer:
            out[v] = i
    return out


def eccentricity_to_set(G: GraphOracle, x: VertexKey, S: Sequence, cap: int = DEFAULT_MAX_RADIUS) -> int:
    """max over y in S of d(x, y)."""
    targets = {G.check(y) for y in S}
    if not targets:
        raise EmptySet("eccentricity to an empty set")
    remaining = set(targets)
    for i, layer in enumerate(bfs_layers(G, [x], cap)):
        remaining.difference_update(layer)
        if not remaining:
            return i
    raise ResourceLimit(f"targets not reached within radius {cap}")


def check_symmetry(G: GraphOracle, vertices: Iterable[VertexKey]) -> list:
    """Return contract violations (asymmetric, self-loop, duplicate, unsorted)."""
    problems = []
    for v in vertices:
        nb = G.neighbors(v)
        if v in nb:
            problems.append(("self_loop", v))
        if len(set(nb)) != len(nb):
            problems.append(("duplicate", v))
        if list(nb) != sorted(nb):
            problems.append(("unsorted", v))
        if not nb:
            problems.append(("isolated", v))
        for w in nb:
            if not G.contains(w) or v not in G.neighbors(w):
                problems.append(("asymmetric", v, w))
    return problems
