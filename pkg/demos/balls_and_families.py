"""
Balls in the built-in infinite graphs
=====================================

Every family is an oracle: vertices are integer tuples and neighbours are
generated on demand, so balls are grown by BFS without building the graph.
"""

from maxgraph import ball, build, distance, parse_family, sphere
from maxgraph.families import closed_form_ball_size

comb = build(parse_family("comb"))
print("B((0,0),2) on the comb:", ball(comb, (0, 0), 2).members)

# ball sizes against the closed form, on the spine and up a tooth
for x in [(0, 0), (5, 3)]:
    sizes = [ball(comb, x, r).size for r in range(8)]
    formula = [closed_form_ball_size(parse_family("comb"), x, r) for r in range(8)]
    print(x, sizes, sizes == formula)

# the 3-regular tree: bare integers are breadth-first vertex numbers
tree = build(parse_family("tree:k=3"))
root = tree.coerce(0)
print("T_3 sphere sizes:", [len(sphere(tree, root, r)) for r in range(6)])
print("T_3 ball sizes:  ", [ball(tree, root, r).size for r in range(6)])

# the steplike dyadic tree grows linearly around its towers
dy = build(parse_family("dyadic"))
print("|B((32,0),r)| =", [ball(dy, (32, 0), r).size for r in range(1, 16)])
print("d((1,0),(8,8)) =", distance(dy, (1, 0), (8, 8)))
