"""Compiled BFS for families that expose an integer vertex codec.

A codec maps vertex keys to int64 ids and supplies a jitted neighbour
function ``nbr(u, out) -> count``.  Visited sets live in a stamped
open-addressing hash table, so ids may be sparse and nothing per vertex is
kept on the Python side.  Oracles stay authoritative: codecs are checked
against ``GraphOracle.neighbors`` by the test-suite.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from ._engine import DONE, EXHAUSTED, MASS, TRUNCATED, Profile

GROW = -2


@dataclass(frozen=True)
class Codec:
    nbr: Callable  # jitted (int64, int64[:]) -> int
    max_degree: int
    encode: Callable
    decode: Callable


@njit(cache=True, inline="always")
def _slot(key, mask):
    return np.int64((np.uint64(key) * np.uint64(0x9E3779B97F4A7C15)) >> np.uint64(20)) & mask


@njit(cache=True)
def _insert(tkeys, tstamp, key, stamp):
    mask = tkeys.shape[0] - 1
    h = _slot(key, mask)
    while True:
        if tstamp[h] != stamp:
            tstamp[h] = stamp
            tkeys[h] = key
            return True
        if tkeys[h] == key:
            return False
        h = (h + 1) & mask


@njit(cache=True)
def _weight(w_ids, w_vals, u):
    if w_ids.shape[0] == 0:
        return 0
    j = np.searchsorted(w_ids, u)
    if j < w_ids.shape[0] and w_ids[j] == u:
        return w_vals[j]
    return 0


@njit
def _nbfs(nbr, buf, tkeys, tstamp, stamp, queue, src, max_radius, cap,
          w_ids, w_vals, stop_mass, sizes, masses):
    limit = queue.shape[0]
    _insert(tkeys, tstamp, src, stamp)
    queue[0] = src
    head = 0
    tail = 1
    layer_end = 1
    r = 0
    w0 = _weight(w_ids, w_vals, src)
    sizes[0] = 1
    masses[0] = w0
    total = 1
    cum = w0
    while True:
        if r >= max_radius:
            return DONE, r, tail
        if total >= cap:
            return TRUNCATED, r, tail
        if stop_mass >= 0 and cum >= stop_mass:
            return MASS, r, tail
        if r + 1 >= sizes.shape[0]:
            return GROW, r, tail
        layer_mass = 0
        while head < layer_end:
            u = queue[head]
            head += 1
            k = nbr(u, buf)
            for e in range(k):
                w = buf[e]
                if _insert(tkeys, tstamp, w, stamp):
                    if tail >= limit:
                        return GROW, r, tail
                    queue[tail] = w
                    tail += 1
                    layer_mass += _weight(w_ids, w_vals, w)
        n_new = tail - layer_end
        if n_new == 0:
            return EXHAUSTED, r, tail
        r += 1
        sizes[r] = n_new
        masses[r] = layer_mass
        layer_end = tail
        total += n_new
        cum += layer_mass


@njit
def _nbest(nbr, buf, tkeys, tstamp, stamp0, queue, sources, dsupp, i0, cap,
           w_ids, w_vals, total_mass, sizes, masses, out_num, out_den, out_size_at_d):
    n = sources.shape[0]
    for i in range(i0, n):
        status, r, tail = _nbfs(nbr, buf, tkeys, tstamp, stamp0 + i, queue, sources[i],
                                1 << 60, cap, w_ids, w_vals, total_mass, sizes, masses)
        if status == GROW:
            return i
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
    return n


class NativeEngine:
    """Same query surface as :class:`BallEngine`, ids given by the codec."""

    def __init__(self, graph, codec: Codec, initial: int = 1 << 12, max_vertices: int = 1 << 27):
        self.graph = graph
        self.codec = codec
        self.max_vertices = max_vertices
        self._buf = np.zeros(max(codec.max_degree, 1), np.int64)
        self._alloc(initial)
        self._stamp = 1
        self._lock = threading.RLock()

    def _alloc(self, n: int) -> None:
        if n > self.max_vertices:
            from .core_graph import ResourceLimit
            raise ResourceLimit(f"BFS exceeded {self.max_vertices} vertices")
        self._qcap = n
        self._queue = np.zeros(n, np.int64)
        self._tkeys = np.zeros(2 * n, np.int64)
        self._tstamp = np.zeros(2 * n, np.int64)
        self._stamp = 1

    def _next_stamp(self, n: int = 1) -> int:
        s = self._stamp
        self._stamp += n
        return s

    def index(self, v) -> int:
        return self.codec.encode(v)

    def key(self, i: int):
        return self.codec.decode(int(i))

    def neighbor_ids(self, i: int) -> list:
        k = self.codec.nbr(np.int64(i), self._buf)
        return self._buf[:k].tolist()

    @staticmethod
    def _weights(weight_ids):
        if not weight_ids:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        items = sorted(weight_ids.items())
        return (np.array([a for a, _ in items], np.int64),
                np.array([b for _, b in items], np.int64))

    def profile(self, v, max_radius: int, cap=None, weight_ids=None, stop_mass: int = -1) -> Profile:
        cap = np.iinfo(np.int64).max if cap is None else int(cap)
        src = self.index(self.graph.check(v))
        w_ids, w_vals = self._weights(weight_ids)
        with self._lock:
            while True:
                sizes = np.zeros(min(max_radius, self._qcap) + 2, np.int64)
                masses = np.zeros_like(sizes)
                status, r, tail = _nbfs(
                    self.codec.nbr, self._buf, self._tkeys, self._tstamp, self._next_stamp(),
                    self._queue, src, max_radius, cap, w_ids, w_vals, stop_mass, sizes, masses)
                if status == GROW:
                    self._alloc(2 * self._qcap)
                    continue
                return Profile(status, r, sizes[: r + 1].copy(), masses[: r + 1].copy(),
                               self._queue[:tail].copy())

    def ball_size(self, v, r: int) -> int:
        return self.profile(v, r).ball_size(r)

    def best_averages(self, source_ids, dsupp, cap: int, weight_ids: dict, total_mass: int):
        sources = np.asarray(source_ids, np.int64)
        d = np.asarray(dsupp, np.int64)
        n = sources.shape[0]
        num = np.zeros(n, np.int64)
        den = np.ones(n, np.int64)
        size_at_d = np.zeros(n, np.int64)
        w_ids, w_vals = self._weights(weight_ids)
        with self._lock:
            i = 0
            while i < n:
                # layer count never exceeds the capped ball size
                sizes = np.zeros(min(self._qcap, cap) + 2, np.int64)
                masses = np.zeros_like(sizes)
                i = _nbest(self.codec.nbr, self._buf, self._tkeys, self._tstamp,
                           self._next_stamp(n + 1), self._queue, sources, d, i, cap,
                           w_ids, w_vals, total_mass, sizes, masses, num, den, size_at_d)
                if i < n:
                    self._alloc(2 * self._qcap)
        return num, den, size_at_d
