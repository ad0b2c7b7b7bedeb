"""
The maximal function of a Dirac delta on the comb
=================================================

M delta_0 at (j, t) is 1/|B((j,t), |j|+t)| = 1/((|j|+1)^2 + 2t), so the level
set {M delta_0 > lam} holds about (2/3) lam^{-3/2} vertices and lam times its
size grows like lam^{-1/2}: no weak-type (1,1) bound.
"""

from fractions import Fraction

from maxgraph import build, parse_family
from maxgraph.maximal import FinSupFn, superlevel_count, weak_norm

comb = build(parse_family("comb"))
delta = FinSupFn.delta((0, 0))

for i in range(2, 9):
    lam = Fraction(1, 2**i)
    rec = superlevel_count(comb, delta, lam)
    print(f"lam = 2^-{i}: |{{M > lam}}| = {rec.count:5d}   lam*count = {float(lam * rec.count):.3f}")

est = weak_norm(comb, delta, Fraction(1, 1024))
print("sup lam*count above 2^-10:", est.lower_bound, f"({float(est.lower_bound):.2f})")
print("fitted slope of log(lam*count) vs log lam:", round(est.divergence_exponent, 3))
print("verdict:", est.verdict)
