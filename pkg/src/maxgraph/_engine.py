"""Compiled BFS over a lazily materialized index of an oracle.

The oracle is the source of truth; :class:`BallEngine` only caches its
neighbour lists as integer CSR rows so that bulk ball-size and ball-average
queries run in compiled loops.  Rows are materialized on demand: when a
kernel reaches a vertex whose row is missing it returns that vertex, the
Python side expands a chunk of the graph around it, and the kernel restarts.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core_graph import GraphOracle, ResourceLimit

# kernel status codes
DONE = 0  # reached max_radius
EXHAUSTED = 1  # finite graph, no new vertices
TRUNCATED = 2  # cumulative size reached cap
MASS = 3  # all positive weight collected
NEED = -1  # row of vertex `info` is not materialized

_INT_MAX = np.iinfo(np.int64).max


@njit(cache=True, nogil=True)
def _bfs(start, deg, adj, mark, stamp, queue, src, max_radius, cap, weights,
         stop_mass, sizes, masses):
    """Layered BFS from ``src``.

    Fills ``sizes[r]``/``masses[r]`` for complete layers and returns
    ``(status, r, tail)`` where layers ``0..r`` are complete and
    ``queue[:tail]`` holds the visited ids in BFS order.  On NEED, ``r`` is
    the offending vertex id.
    """
    mark[src] = stamp
    queue[0] = src
    head = 0
    tail = 1
    layer_end = 1
    r = 0
    sizes[0] = 1
    masses[0] = weights[src]
    total = 1
    cum = weights[src]
    while True:
        if r >= max_radius:
            return DONE, r, tail
        if total >= cap:
            return TRUNCATED, r, tail
        if stop_mass >= 0 and cum >= stop_mass:
            return MASS, r, tail
        layer_mass = 0
        while head < layer_end:
            u = queue[head]
            head += 1
            s = start[u]
            if s < 0:
                return NEED, u, tail
            for e in range(s, s + deg[u]):
                w = adj[e]
                if mark[w] != stamp:
                    mark[w] = stamp
                    queue[tail] = w
                    tail += 1
                    layer_mass += weights[w]
        n_new = tail - layer_end
        if n_new == 0:
            return EXHAUSTED, r, tail
        r += 1
        sizes[r] = n_new
        masses[r] = layer_mass
        layer_end = tail
        total += n_new
        cum += layer_mass


@njit(cache=True, nogil=True)
def _best_averages(start, deg, adj, mark, stamp0, queue, sources, dsupp, i0,
                   cap, weights, total_mass, sizes, masses, out_num, out_den,
                   out_size_at_d):
    """Best ball average for each source, truncated at ball size ``cap``.

    For source ``i`` writes the maximizing (mass, size) pair over complete
    layers into ``out_num/out_den`` and ``|B(x, dsupp[i])|`` into
    ``out_size_at_d`` (or -1 when the search stopped with fewer layers, which
    certifies ``|B(x, dsupp[i])| >= cap``).  Returns ``(i, need, tail)``: the
    first unfinished index, the vertex whose row is missing (or -1) and the
    number of vertices that search had visited.
    """
    n = sources.shape[0]
    for i in range(i0, n):
        stamp = stamp0 + i
        status, r, tail = _bfs(start, deg, adj, mark, stamp, queue, sources[i],
                               1 << 60, cap, weights, total_mass, sizes, masses)
        if status == NEED:
            return i, r, tail
        best_num = 0
        best_den = 1
        cum_n = 0
        cum_m = 0
        d = dsupp[i]
        size_at_d = -1
        for j in range(r + 1):
            cum_n += sizes[j]
            cum_m += masses[j]
            if cum_m * best_den > best_num * cum_n:
                best_num = cum_m
                best_den = cum_n
            if j == d:
                size_at_d = cum_n
        out_num[i] = best_num
        out_den[i] = best_den
        out_size_at_d[i] = size_at_d
    return n, -1, 0


@dataclass
class Profile:
    """Sphere sizes (and optional sphere masses) of one BFS."""

    status: int
    radius: int  # layers 0..radius are complete
    sizes: np.ndarray
    masses: np.ndarray
    order: np.ndarray  # visited ids in BFS order

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.sizes)

    def ball_size(self, r: int) -> int:
        """|B(x, r)|; valid for r <= radius, or any r once exhausted."""
        if r <= self.radius:
            return int(self.sizes[: r + 1].sum())
        if self.status == EXHAUSTED:
            return int(self.sizes.sum())
        raise ValueError(f"radius {r} beyond completed profile ({self.radius})")


class BallEngine:
    """Integer-indexed, lazily grown CSR cache of one oracle."""

    def __init__(self, graph: GraphOracle, chunk: int = 4096, max_vertices: int = 50_000_000):
        self.graph = graph
        self.chunk = chunk
        self.max_vertices = max_vertices
        self.ids: dict = {}
        self.keys: list = []
        self._cap = 1024
        self._start = np.full(self._cap, -1, np.int64)
        self._deg = np.zeros(self._cap, np.int64)
        self._mark = np.zeros(self._cap, np.int64)
        self._queue = np.zeros(self._cap, np.int64)
        self._weights = np.zeros(self._cap, np.int64)
        self._adj = np.zeros(4096, np.int64)
        self._nadj = 0
        self._stamp = 1
        self._expanded = 0
        self._lock = threading.RLock()

    # -- indexing ---------------------------------------------------------

    def _grow(self, need: int) -> None:
        if need <= self._cap:
            return
        if need > self.max_vertices:
            raise ResourceLimit(f"engine index exceeded {self.max_vertices} vertices")
        cap = max(need, 2 * self._cap)
        self._start = _resized(self._start, cap, -1)
        self._deg = _resized(self._deg, cap, 0)
        self._mark = _resized(self._mark, cap, 0)
        self._queue = _resized(self._queue, cap, 0)
        self._weights = _resized(self._weights, cap, 0)
        self._cap = cap

    def index(self, v) -> int:
        i = self.ids.get(v)
        if i is None:
            i = len(self.keys)
            self._grow(i + 1)
            self.ids[v] = i
            self.keys.append(v)
        return i

    def _expand_one(self, i: int) -> list:
        nb = self.graph.neighbors(self.keys[i])
        row = [self.index(w) for w in nb]
        k = len(row)
        if self._nadj + k > self._adj.shape[0]:
            self._adj = _resized(self._adj, max(2 * self._adj.shape[0], self._nadj + k), 0)
        self._adj[self._nadj:self._nadj + k] = row
        self._start[i] = self._nadj
        self._deg[i] = k
        self._nadj += k
        self._expanded += 1
        return row

    def _expand_around(self, i: int, visited: int = 0) -> None:
        # proportional to the stalled search, so restarts cost O(log) passes
        budget = max(self.chunk, visited)
        # grow through the unmaterialized region only
        frontier = [i]
        seen = {i}
        done = 0
        while frontier and done < budget:
            nxt = []
            for u in frontier:
                if self._start[u] >= 0:
                    continue
                for w in self._expand_one(u):
                    if w not in seen and self._start[w] < 0:
                        seen.add(w)
                        nxt.append(w)
                done += 1
                if done >= budget:
                    break
            frontier = nxt

    def key(self, i: int):
        return self.keys[i]

    def neighbor_ids(self, i: int) -> list:
        with self._lock:
            if self._start[i] < 0:
                return self._expand_one(i)
            s = self._start[i]
            return self._adj[s:s + self._deg[i]].tolist()

    # -- queries ----------------------------------------------------------

    def _next_stamp(self, n: int = 1) -> int:
        s = self._stamp
        self._stamp += n
        return s

    def profile(self, v, max_radius: int, cap: int | None = None, weight_ids=None,
                stop_mass: int = -1) -> Profile:
        """BFS sphere sizes from ``v`` up to ``max_radius``.

        ``cap`` stops the search once the ball has at least that many
        vertices.  ``weight_ids`` maps vertex ids to integer weights whose
        per-sphere sums are returned in ``masses``.
        """
        cap = _INT_MAX if cap is None else int(cap)
        with self._lock:
            src = self.index(self.graph.check(v))
            self._set_weights(weight_ids)
            try:
                while True:
                    sizes = np.zeros(min(max_radius, self._cap) + 2, np.int64)
                    masses = np.zeros_like(sizes)
                    status, r, tail = _bfs(
                        self._start, self._deg, self._adj, self._mark,
                        self._next_stamp(), self._queue, src, max_radius, cap,
                        self._weights, stop_mass, sizes, masses)
                    if status == NEED:
                        self._expand_around(r, tail)
                        continue
                    return Profile(status, r, sizes[: r + 1].copy(), masses[: r + 1].copy(),
                                   self._queue[:tail].copy())
            finally:
                self._clear_weights(weight_ids)

    def ball_size(self, v, r: int) -> int:
        return self.profile(v, r).ball_size(r)

    def best_averages(self, source_ids, dsupp, cap: int, weight_ids: dict, total_mass: int):
        """Vectorized best ball averages; see :func:`_best_averages`."""
        sources = np.asarray(source_ids, np.int64)
        d = np.asarray(dsupp, np.int64)
        n = sources.shape[0]
        num = np.zeros(n, np.int64)
        den = np.ones(n, np.int64)
        size_at_d = np.zeros(n, np.int64)
        with self._lock:
            self._set_weights(weight_ids)
            try:
                i = 0
                while i < n:
                    sizes = np.zeros(min(self._cap, cap) + 2, np.int64)
                    masses = np.zeros_like(sizes)
                    stamp0 = self._next_stamp(n)
                    i, need, tail = _best_averages(
                        self._start, self._deg, self._adj, self._mark, stamp0,
                        self._queue, sources, d, i, cap, self._weights, total_mass,
                        sizes, masses, num, den, size_at_d)
                    if need >= 0:
                        self._expand_around(need, tail)
            finally:
                self._clear_weights(weight_ids)
        return num, den, size_at_d

    def _set_weights(self, weight_ids) -> None:
        if weight_ids:
            for i, w in weight_ids.items():
                self._weights[i] = w

    def _clear_weights(self, weight_ids) -> None:
        if weight_ids:
            for i in weight_ids:
                self._weights[i] = 0


def _resized(a: np.ndarray, n: int, fill) -> np.ndarray:
    out = np.full(n, fill, a.dtype)
    out[: a.shape[0]] = a
    return out


_ENGINES_LOCK = threading.Lock()


def engine_for(G: GraphOracle) -> BallEngine:
    """The engine cached on ``G`` (created on first use)."""
    eng = G.__dict__.get("_ball_engine")
    if eng is None:
        with _ENGINES_LOCK:
            eng = G.__dict__.get("_ball_engine")
            if eng is None:
                codec = getattr(G, "codec", None)
                if codec is not None:
                    from ._native import NativeEngine
                    eng = NativeEngine(G, codec())
                else:
                    eng = BallEngine(G)
                G.__dict__["_ball_engine"] = eng
    return eng
