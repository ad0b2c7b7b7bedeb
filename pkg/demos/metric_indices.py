"""
Dilation, doubling and equidistant comparability on windows
============================================================

On an infinite graph every index is a supremum; restricted to a finite
window it becomes a certified lower bound with a witness.
"""

from maxgraph import build, parse_family
from maxgraph.indices import Window, dilation_lb, doubling_K_lb, ecp_lb, escalate, max_degree_lb

for label in ["oplusK", "dyadic", "tree:k=3", "comb"]:
    G = build(parse_family(label))
    W = Window.around(G, 6)
    d2 = dilation_lb(G, 2, W, 4)
    print(f"{label:9s} |W|={len(W):4d}  D2>={float(d2.value):7.3f} at {d2.witness}"
          f"  K>={float(doubling_K_lb(G, W, 4).value):7.3f}"
          f"  C>={float(ecp_lb(G, Window.around(G, 3)).value):6.3f}"
          f"  Delta>={max_degree_lb(G, W).value}")

# growing windows: D2 on the comb keeps increasing, evidence (not proof) of D2 = infinity
comb = build(parse_family("comb"))
e = escalate("D2 on comb", lambda R: dilation_lb(comb, 2, Window.around(comb, R), R).value,
             [2, 4, 8, 16], 4)
print("comb D2 escalation:", [f"{float(v):.2f}" for v in e.values], e.unbounded_evidence)
