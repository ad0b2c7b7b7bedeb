from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from maxgraph import build, parse_family
from maxgraph.indices import (
    BallFamily, HeuristicInconclusive, Window, all_balls, cover_reduce, dilation_lb,
    doubling_K_lb, ecp_lb, escalate, finite_overlap_index, floor_log_exponent, max_degree_lb,
    overlap_certificate, parse_ball_family, private_points_of, telescoping_exponent,
)

from oracles import ref_ball, ref_distance, ref_min_overlap

GRAPHS = {lab: build(parse_family(lab)) for lab in
          ["comb", "tree:k=3", "dyadic", "oplusK", "shiftK", "cycle:n=6", "linear:n=5"]}


def size(G, x, r):
    return len(ref_ball(G, x, r))


@pytest.mark.parametrize("lab", list(GRAPHS))
def test_dilation_and_doubling_brute_force(lab):
    G = GRAPHS[lab]
    W = Window.around(G, 2)
    for k in (2, 3):
        est = dilation_lb(G, k, W, 3)
        brute = max(Fraction(size(G, x, k * r), size(G, x, r)) for x in W.members for r in range(4))
        assert est.value == brute
        x, r = est.witness["x"], est.witness["r"]
        assert Fraction(size(G, x, k * r), size(G, x, r)) == est.value
    K = doubling_K_lb(G, W, 2)
    brute = max(Fraction(size(G, x, n), size(G, x, n // 2)) for x in W.members for n in range(1, 5))
    assert K.value == brute


@pytest.mark.parametrize("lab", list(GRAPHS))
def test_ecp_and_degree_brute_force(lab):
    G = GRAPHS[lab]
    W = Window.around(G, 2)
    brute = Fraction(0)
    for x in W.members:
        for y in W.members:
            d = ref_distance(G, x, y)
            brute = max(brute, Fraction(size(G, x, d), size(G, y, d)))
    assert ecp_lb(G, W).value == brute
    assert max_degree_lb(G, W).value == max(len(G.neighbors(v)) for v in W.members)


@given(lab=st.sampled_from(["comb", "tree:k=3", "dyadic", "shiftK", "cycle:n=6"]),
       picks=st.lists(st.tuples(st.integers(0, 999), st.integers(0, 3)), min_size=1, max_size=7))
def test_certificate_is_sound_and_optimal(lab, picks):
    G = GRAPHS[lab]
    pool = sorted(ref_ball(G, G.origin, 3))
    balls = [(pool[i % len(pool)], r) for i, r in picks]
    F = BallFamily.of(G, balls)
    cert = overlap_certificate(G, F)
    members = [set(ref_ball(G, c, r)) for c, r in balls]
    union = set().union(*members)
    sub = cert.minimizing_subfamily
    assert set().union(*(members[i] for i in sub)) == union
    assert max(sum(v in members[i] for i in sub) for v in union) == cert.min_overlap
    assert cert.min_overlap == ref_min_overlap(members)
    for m in range(1, len(balls) + 1):
        found = cover_reduce(F, m)
        assert (found is None) == (ref_min_overlap(members) > m)


def test_private_points():
    G = GRAPHS["comb"]
    F = BallFamily.of(G, [((0, 0), 1), ((3, 0), 1), ((1, 0), 2)])
    priv = private_points_of(F)
    assert set(priv) == {1, 2}
    for i, v in priv.items():
        assert v in F.materialized[i]
        assert all(v not in F.materialized[j] for j in range(len(F)) if j != i)


def test_greedy_path_for_large_families():
    G = GRAPHS["comb"]
    # the singletons are redundant; the radius-1 balls all own a tooth point
    F = BallFamily.of(G, [((j, 0), 1) for j in range(25)] + [((j, 0), 0) for j in range(25)])
    sub = cover_reduce(F, 3)
    assert sub is not None and set().union(*(F.materialized[i] for i in sub)) == F.union()
    with pytest.raises(HeuristicInconclusive):
        cover_reduce(F, 2)


def _brute_O(G):
    balls = [frozenset(s) for _, _, s in all_balls(G)]
    best = 0
    for k in range(1, len(balls) + 1):
        for fam in combinations(balls, k):
            best = max(best, ref_min_overlap([set(b) for b in fam]))
    return best


@pytest.mark.parametrize("lab", ["complete:n=3", "star:n=3", "star:n=4", "linear:n=3",
                                 "linear:n=4", "cycle:n=4"])
def test_finite_overlap_index_brute_force(lab):
    G = build(parse_family(lab))
    O, witness = finite_overlap_index(G)
    assert O == _brute_O(G)
    fam = BallFamily.of(G, witness)
    assert overlap_certificate(G, fam).min_overlap == O


def test_distinct_balls():
    G = build(parse_family("cycle:n=5"))
    sets = [s for _, _, s in all_balls(G)]
    assert len(sets) == len(set(map(frozenset, sets))) == 11


@given(st.integers(2, 9), st.integers(2, 200))
def test_exponents(k, k2):
    p = telescoping_exponent(k, k2)
    assert k**p >= k2 and (p == 1 or k ** (p - 1) < k2)
    q = floor_log_exponent(k, k2)
    assert k ** (q - 1) <= k2 < k**q
    assert p <= q


def test_escalation_rules():
    e = escalate("x", lambda t: Fraction(t), [1, 2, 3, 4], 3)
    assert e.unbounded_evidence
    assert not escalate("x", lambda t: Fraction(t), [1, 2, 3], 2).unbounded_evidence
    assert not escalate("x", lambda t: Fraction(5 - abs(t - 3)), [1, 2, 3, 4, 5], 1).unbounded_evidence
    assert not escalate("x", lambda t: Fraction(t), [1, 2, 3, 4], 10).unbounded_evidence


def test_ball_literals():
    assert parse_ball_family("((3,1),2);((4,0),1)") == [((3, 1), 2), ((4, 0), 1)]
    for bad in ["", "((3,1))", "(3,1),2"]:
        with pytest.raises(ValueError):
            parse_ball_family(bad)


def test_window_constructors():
    G = GRAPHS["comb"]
    W = Window.around(G, 1)
    assert set(W.members) == ref_ball(G, (0, 0), 1) and len(W) == 4
    V = Window.of(G, [(2, 0), (0, 0)])
    assert V.radius == -1 and V.members == ((0, 0), (2, 0))
    assert dilation_lb(G, 2, W, 2).summary()["window_size"] == 4
    with pytest.raises(ValueError):
        dilation_lb(G, 1, W, 2)
