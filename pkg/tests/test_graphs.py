from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from maxgraph import GraphError, ResourceLimit, UnknownVertex, ball, distance, sphere
from maxgraph._engine import BallEngine, engine_for
from maxgraph.core_graph import check_symmetry
from maxgraph.families import (
    Disconnected, InvalidSpec, ParseError, SelfLoop, build, closed_form_ball_size,
    closed_form_degree, load_edge_list, parse_family, spec_of,
)

from oracles import ref_ball, ref_distance, ref_sphere

INFINITE = ["oplusK", "shiftK", "tree:k=3", "tree:k=4", "comb", "dyadic"]
FINITE = ["complete:n=6", "star:n=5", "linear:n=7", "cycle:n=8"]


def near(label, radius):
    G = build(parse_family(label))
    return G, sorted(ref_ball(G, G.origin, radius))


@pytest.fixture(scope="module")
def graphs():
    return {lab: near(lab, 6) for lab in INFINITE + FINITE}


label_st = st.sampled_from(INFINITE + FINITE)


@given(label=label_st, i=st.integers(0, 10_000), r=st.integers(0, 7))
def test_ball_matches_plain_bfs(graphs, label, i, r):
    G, pool = graphs[label]
    x = pool[i % len(pool)]
    assert set(ball(G, x, r).members) == ref_ball(G, x, r)


@given(label=label_st, i=st.integers(0, 10_000), r=st.integers(0, 6))
def test_balls_nest_and_spheres_partition(graphs, label, i, r):
    G, pool = graphs[label]
    x = pool[i % len(pool)]
    b = ball(G, x, r)
    bigger = set(ball(G, x, r + 1).members)
    assert set(b.members) <= bigger
    shells = [set(sphere(G, x, s)) for s in range(r + 1)]
    assert sum(map(len, shells)) == b.size
    assert set().union(*shells) == set(b.members)
    assert list(b.layer_sizes) == [len(s) for s in shells]


@given(label=label_st, a=st.integers(0, 10_000), b=st.integers(0, 10_000),
       c=st.integers(0, 10_000))
def test_metric_axioms(graphs, label, a, b, c):
    G, pool = graphs[label]
    x, y, z = (pool[t % len(pool)] for t in (a, b, c))
    dxy, dyz, dxz = distance(G, x, y), distance(G, y, z), distance(G, x, z)
    assert dxy == distance(G, y, x) == ref_distance(G, x, y)
    assert (dxy == 0) == (x == y)
    assert dxz <= dxy + dyz


@pytest.mark.parametrize("label", INFINITE)
def test_native_codec_agrees_with_generic_engine(label):
    G = build(parse_family(label))
    native = engine_for(G)
    assert not isinstance(native, BallEngine)
    generic = BallEngine(G)
    for x in sorted(ref_ball(G, G.origin, 3)):
        for r in range(6):
            assert native.ball_size(x, r) == generic.ball_size(x, r) == len(ref_ball(G, x, r))


@pytest.mark.parametrize("label", INFINITE + FINITE)
def test_adjacency_is_symmetric(label):
    G, pool = near(label, 5)
    assert check_symmetry(G, pool) == []


@pytest.mark.parametrize("label", INFINITE + FINITE)
def test_degree_closed_form(label):
    spec = parse_family(label)
    G, pool = near(label, 5)
    for v in pool:
        cf = closed_form_degree(spec, v)
        if cf is not None:
            assert cf == len(G.neighbors(v))


@given(k=st.integers(2, 5), d=st.integers(0, 3), r=st.integers(0, 5))
def test_tree_ball_closed_form(k, d, r):
    G = build(parse_family(f"tree:k={k}"))
    x = (d, 0)
    assert closed_form_ball_size(parse_family(f"tree:k={k}"), x, r) == len(ref_ball(G, x, r))


def test_spec_round_trip():
    for label in INFINITE + FINITE:
        spec = parse_family(label)
        assert parse_family(spec.label()) == spec
        assert spec_of(build(spec)) == spec


@pytest.mark.parametrize("bad", ["nope", "tree:k=1", "tree", "cycle:n=2", "comb:n=3",
                                 "complete:n=x", "star:k=4"])
def test_bad_family_strings(bad):
    with pytest.raises(InvalidSpec):
        build(parse_family(bad))


def test_unknown_vertices():
    for label, v in [("comb", (0, -1)), ("dyadic", (3, 1)), ("oplusK", (2, 2)),
                     ("shiftK", (1, 0)), ("tree:k=3", (1, 3))]:
        G = build(parse_family(label))
        with pytest.raises(UnknownVertex):
            G.check(v)
        with pytest.raises(GraphError):
            ball(G, v, 1)


def test_tree_integer_vertices():
    G = build(parse_family("tree:k=3"))
    assert G.coerce(0) == (0, 0)
    assert G.coerce(1) == (1, 0)
    assert G.coerce(4) == (2, 0)
    for n in range(40):
        assert G.vertex_number(G.coerce(n)) == n


def test_member_cap():
    G = build(parse_family("tree:k=3"))
    with pytest.raises(ResourceLimit):
        ball(G, (0, 0), 12, max_members=100)


def test_edge_list(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# square with a tail\n0 1\n1 2\n2 3\n3 0\n3 4\n")
    G = load_edge_list(p)
    assert G.is_finite and len(G.vertices()) == 5
    assert ball(G, (4,), 1).members == ((3,), (4,))
    assert distance(G, (4,), (1,)) == 3
    assert ref_sphere(G, (0,), 2) == {(2,), (4,)}
    G2 = build(parse_family(f"edgelist:path={p}"))
    assert G2.vertices() == G.vertices()


@pytest.mark.parametrize("text,exc", [("0 0\n", SelfLoop), ("0 1\n2 3\n", Disconnected),
                                      ("0 x\n", ParseError), ("", ParseError),
                                      ("1 2 3\n", ParseError)])
def test_edge_list_errors(tmp_path, text, exc):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises(exc):
        load_edge_list(p)


def test_finite_ball_saturates():
    G = build(parse_family("linear:n=4"))
    b = ball(G, (0,), 10)
    assert b.size == 4 and len(b.layer_sizes) == 11 and b.layer_sizes[-1] == 0
    assert closed_form_ball_size(parse_family("linear:n=4"), (1,), 2) == 4
    assert Fraction(b.size) == 4
