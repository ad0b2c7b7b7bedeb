from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from maxgraph import build, parse_family
from maxgraph.maximal import (
    EmptyFunction, FinSupFn, delta_maximal_at, exact_weak_norm_finite, hl_maximal_at,
    maximal_values, operator_norm_lb, parse_function, parse_vertex, superlevel_count, weak_norm,
)

from oracles import ref_ball, ref_distance, ref_maximal

LABELS = ["comb", "tree:k=3", "dyadic", "oplusK", "shiftK", "cycle:n=7", "star:n=6"]
GRAPHS = {lab: build(parse_family(lab)) for lab in LABELS}
POOLS = {lab: sorted(ref_ball(G, G.origin, 3)) for lab, G in GRAPHS.items()}

rat = st.fractions(min_value=Fraction(1, 16), max_value=4, max_denominator=16)


@st.composite
def fn_and_point(draw, labels=LABELS):
    lab = draw(st.sampled_from(labels))
    pool = POOLS[lab]
    idx = draw(st.lists(st.integers(0, len(pool) - 1), min_size=1, max_size=4, unique=True))
    vals = draw(st.lists(rat, min_size=len(idx), max_size=len(idx)))
    x = pool[draw(st.integers(0, len(pool) - 1))]
    return lab, FinSupFn({pool[i]: v for i, v in zip(idx, vals)}), x


@given(fn_and_point())
def test_maximal_matches_brute_force(case):
    lab, f, x = case
    G = GRAPHS[lab]
    reach = max(ref_distance(G, x, y) for y in f.support)
    assert hl_maximal_at(G, f, x) == ref_maximal(G, f, x, reach)
    assert maximal_values(G, f, [x]) == [hl_maximal_at(G, f, x)]


@given(fn_and_point(), fn_and_point())
def test_sublinear(a, b):
    lab, f, x = a
    G = GRAPHS[lab]
    g = FinSupFn({POOLS[lab][0]: Fraction(1, 3)}) if b[0] != lab else b[1]
    assert hl_maximal_at(G, f + g, x) <= hl_maximal_at(G, f, x) + hl_maximal_at(G, g, x)


@given(fn_and_point(), rat)
def test_positive_homogeneous(case, c):
    lab, f, x = case
    G = GRAPHS[lab]
    assert hl_maximal_at(G, f.scale(c), x) == c * hl_maximal_at(G, f, x)


@given(fn_and_point())
def test_dominates_f_and_bounded_by_sup(case):
    lab, f, x = case
    G = GRAPHS[lab]
    m = hl_maximal_at(G, f, x)
    assert f(x) <= m <= max(f.values.values())


@given(st.sampled_from(LABELS), st.integers(0, 999), st.integers(0, 999))
def test_delta_formula(lab, i, j):
    G, pool = GRAPHS[lab], POOLS[lab]
    x0, y = pool[i % len(pool)], pool[j % len(pool)]
    d = ref_distance(G, x0, y)
    expect = Fraction(1, len(ref_ball(G, y, d)))
    assert delta_maximal_at(G, x0, y) == expect == hl_maximal_at(G, FinSupFn.delta(x0), y)


@given(fn_and_point(["comb", "tree:k=3", "dyadic", "cycle:n=7"]),
       st.fractions(min_value=Fraction(1, 40), max_value=1, max_denominator=40),
       st.fractions(min_value=Fraction(1, 40), max_value=1, max_denominator=40))
def test_superlevel_counts_monotone(case, a, b):
    lab, f, _ = case
    G = GRAPHS[lab]
    lo, hi = sorted((a, b))
    c_lo = superlevel_count(G, f, lo * f.total_mass)
    c_hi = superlevel_count(G, f, hi * f.total_mass)
    assert c_lo.exact and c_hi.exact
    assert c_lo.count >= c_hi.count


def test_superlevel_members_match_brute_force():
    G = GRAPHS["comb"]
    f = FinSupFn({(0, 0): 1, (2, 1): Fraction(1, 2)})
    lam = Fraction(1, 12)
    rec = superlevel_count(G, f, lam, with_members=True)
    # M f <= ||f||_1 / |B(x, d)| forces every member into a bounded window
    cand = ref_ball(G, (0, 0), 30)
    brute = sorted(x for x in cand if hl_maximal_at(G, f, x) > lam)
    assert rec.members == brute


@pytest.mark.parametrize("lab", ["cycle:n=7", "star:n=6", "complete:n=5", "linear:n=6"])
def test_weak_norm_equals_exact_on_finite(lab):
    G = build(parse_family(lab))
    V = G.vertices()
    f = FinSupFn({V[0]: 1, V[-1]: Fraction(1, 3)})
    est = weak_norm(G, f, Fraction(1, 10**6))
    assert est.exact
    assert est.lower_bound == exact_weak_norm_finite(G, f)
    vals = sorted((hl_maximal_at(G, f, v) for v in V), reverse=True)
    assert est.lower_bound == max(v * (i + 1) for i, v in enumerate(vals))


def test_weak_norm_counts_are_ge_sets():
    G = GRAPHS["tree:k=3"]
    f = FinSupFn.delta((0, 0))
    est = weak_norm(G, f, Fraction(1, 200))
    for v, c in est.counts:
        assert c == superlevel_count(G, f, v).count + sum(
            1 for y in ref_ball(G, (0, 0), 6) if hl_maximal_at(G, f, y) == v)
    assert est.curve == [(v, v * c) for v, c in est.counts]


def test_operator_norm_of_deltas_on_tree():
    G = GRAPHS["tree:k=3"]
    lb = operator_norm_lb(G, [FinSupFn.delta((0, 0)), FinSupFn.delta((1, 0))], Fraction(1, 500))
    assert 0 < lb <= 1


def test_parse_literals(tmp_path):
    assert parse_vertex("(3, -1)") == (3, -1)
    assert parse_function("delta@(2,1)") == FinSupFn.delta((2, 1))
    p = tmp_path / "f.txt"
    p.write_text("# two points\n(0,0) 1/2\n(1,0) 3\n(0,0) 1/2\n")
    f = parse_function(str(p), GRAPHS["comb"])
    assert f.values == {(0, 0): 1, (1, 0): 3}
    with pytest.raises(ValueError):
        parse_function("delta@")
    p.write_text("(0,0) abc\n")
    with pytest.raises(ValueError):
        parse_function(str(p))
    p.write_text("(0,0) 0\n")
    with pytest.raises(EmptyFunction):
        parse_function(str(p))


def test_negative_values_rejected():
    with pytest.raises(ValueError):
        FinSupFn({(0, 0): -1})
    with pytest.raises(EmptyFunction):
        hl_maximal_at(GRAPHS["comb"], FinSupFn({}), (0, 0))
