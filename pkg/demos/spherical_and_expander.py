"""
Spherical averages and the expander function
============================================
"""

import math
from fractions import Fraction

from maxgraph import build, parse_family
from maxgraph.indices import Window
from maxgraph.maximal import FinSupFn, hl_maximal_at
from maxgraph.spherical import (
    SequencePair, expander_lb, lemma42_check, spherical_maximal_at, thm41_rhs,
)

tree = build(parse_family("tree:k=3"))
f = FinSupFn({(0, 0): 1, (2, 3): Fraction(1, 2), (1, 1): 4})
for x in [(0, 0), (1, 0), (3, 5)]:
    print(x, "M f =", hl_maximal_at(tree, f, x), " spherical M f =", spherical_maximal_at(tree, f, x))

# exhaustive search over subsets of a window gives a certified lower bound
for r in (1, 2):
    est = expander_lb(tree, r, Window.around(tree, r + 1), 3, "exhaustive")
    print(f"E_T3({r}) >= {est.q_value}   A={est.witness_A}  B={est.witness_B}")

rep = lemma42_check(tree, FinSupFn({(1, 0): 4, (2, 1): 1, (0, 0): 2}), 1, Window.around(tree, 5))
for s in rep.steps:
    print(f"  {s.name:22s} {'ok' if s.passed else 'FAILED'}")

# S(r) = 2^r, E(r) = 2^-r with a geometric tail
seq = SequencePair({r: Fraction(2**r) for r in range(8)}, {r: Fraction(1, 2**r) for r in range(8)},
                   7, "geometric", ratio=2**-0.5, growth=2.0)
res = thm41_rhs(seq, 40)
print("bound functional:", res.value, " 2+2*sqrt(2) =", 2 + 2 * math.sqrt(2))
