"""
Overlap certificates
====================

A ball owning a private point cannot be dropped from a union-preserving
subfamily, so a family in which every ball owns one certifies its own overlap.
"""

from maxgraph import build, parse_family
from maxgraph.indices import BallFamily, cover_reduce, finite_overlap_index, overlap_certificate

G = build(parse_family("shiftK"))
m = 6
balls = [((m - 2, 0), 2), ((m - 1, 1), 2), ((m, 1), 1), ((m + 1, 1), 2), ((m + 2, 0), 2)]
cert = overlap_certificate(G, BallFamily.of(G, balls))
print("five balls through", (m, 0), "-> least overlap", cert.min_overlap)
print("private points:", cert.private_points)

# a redundant family reduces
G = build(parse_family("oplusK"))
F = BallFamily.of(G, [((3, 1), 1), ((4, 1), 1), ((3, 2), 1), ((4, 2), 2)])
print("oplusK family reduces to", cover_reduce(F, 2), "with overlap",
      overlap_certificate(G, F).min_overlap)

# exact overlap index of small finite graphs
for label in ["complete:n=5", "star:n=6", "cycle:n=7", "linear:n=8"]:
    O, witness = finite_overlap_index(build(parse_family(label)))
    print(f"O({label}) = {O}   witness {witness}")
