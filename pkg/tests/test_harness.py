import json
from fractions import Fraction

import jsonschema
import pytest

from maxgraph.harness import cli
from maxgraph.harness.config import DEFAULTS, DEFAULTS_VERSION, RunConfig, threads_from_env
from maxgraph.harness.report import curve_csv, dumps, envelope, load_schema, rational, to_jsonable
from maxgraph.harness.suites import (
    FAIL, PASS, SUITES, Context, resolve, run_many, run_suite, suite,
)

SCHEMA = load_schema()


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    return code, rep


def test_ball_report(capsys):
    code, rep = report(capsys, "ball", "--family", "comb", "--center", "(0,2)", "--radius", "3")
    assert code == 0 and rep["status"] == "ok"
    assert rep["result"]["size"] == rep["result"]["closed_form"] == 8
    assert rep["config"]["defaults_version"] == DEFAULTS_VERSION


def test_tree_center_is_a_vertex_number(capsys):
    _, rep = report(capsys, "ball", "--family", "tree:k=3", "--center", "0", "--radius", "2")
    assert rep["result"]["center"] == [0, 0]
    assert rep["result"]["layer_sizes"] == [1, 3, 6]


def test_weak_norm_csv(capsys):
    code, out, _ = run(capsys, "weak-norm", "--family", "tree:k=3", "--fn", "delta@(0,0)",
                       "--lambda-floor", "1/50", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "lambda,count,product"
    for ln in lines[1:]:
        lam, count, prod = ln.split(",")
        assert Fraction(lam) * int(count) == Fraction(prod)
    assert Fraction(lines[1].split(",")[0]) == 1


def test_weak_norm_json_has_rationals(capsys):
    _, rep = report(capsys, "weak-norm", "--family", "comb", "--fn", "delta@(0,0)",
                    "--lambda-floor", "1/64")
    assert "/" in rep["result"]["lower_bound"]
    assert rep["config"]["lambda_floor"] == "1/64"


@pytest.mark.parametrize("argv", [
    ["sphere", "--family", "dyadic", "--center", "(4,0)", "--radius", "2"],
    ["maximal", "--family", "comb", "--fn", "delta@(0,0)", "--at", "(1,0)", "--at", "(0,3)"],
    ["indices", "--family", "dyadic", "--window-radius", "4", "--r-max", "3", "--k", "2", "--k", "3"],
    ["overlap", "--family", "shiftK", "--balls", "((2,0),2);((3,1),2);((4,1),1);((5,1),2);((6,0),2)"],
    ["overlap", "--family", "star:n=5"],
    ["expander", "--family", "tree:k=3", "--radius", "1", "--max-size", "2"],
    ["lemma42", "--family", "tree:k=3", "--fn", "delta@(0,0)", "--radius", "1",
     "--window-radius", "4"],
    ["verify", "--list"],
    ["verify", "prop-3.1-i"],
])
def test_commands_validate(capsys, argv):
    code, rep = report(capsys, *argv)
    assert code == 0 and rep["command"] == argv[0]


def test_overlap_values(capsys):
    _, rep = report(capsys, "overlap", "--family", "shiftK", "--balls",
                    "((2,0),2);((3,1),2);((4,1),1);((5,1),2);((6,0),2)")
    assert rep["result"]["min_overlap"] == 5
    _, rep = report(capsys, "overlap", "--family", "star:n=5")
    assert rep["result"]["overlap_index"] == 4


def test_thm41_command(capsys, tmp_path):
    p = tmp_path / "seq.txt"
    p.write_text("tail geometric ratio=0.7071067811865476 growth=2\n"
                 + "".join(f"{r} {2**r} 1/{2**r}\n" for r in range(6)))
    code, rep = report(capsys, "thm41", "--sequence", str(p))
    assert code == 0
    assert abs(rep["result"]["value"] - (2 + 2 * 2**0.5)) < 1e-9


def test_alias_and_text_output(capsys):
    code, out, _ = run(capsys, "verify", "prop-3.2-overlap", "--format", "text")
    assert code == 0
    assert 'result.id: "prop-3.2-ii"' in out and 'status: "ok"' in out


def test_out_file(capsys, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "ball", "--family", "comb", "--center", "(0,0)", "--radius", "1",
                       "--out", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["result"]["size"] == 4


@pytest.mark.parametrize("argv,flag", [
    (["ball", "--family", "nope", "--center", "0", "--radius", "1"], "--family"),
    (["ball", "--family", "comb", "--center", "(0,-3)", "--radius", "1"], "--center"),
    (["ball", "--family", "comb", "--center", "(0,0)", "--radius", "-1"], "--radius"),
    (["maximal", "--family", "comb", "--fn", "nonsense"], "--fn"),
    (["overlap", "--family", "comb"], "--balls"),
    (["overlap", "--family", "comb", "--balls", "((0,0)"], "--balls"),
    (["verify", "prop-9.9"], "prop_id"),
    (["ball", "--family", "comb", "--center", "(0,0)", "--radius", "1", "--format", "csv"],
     "--format"),
    (["indices", "--family", "comb", "--k", "1"], "--k"),
    (["thm41", "--sequence", "/nonexistent"], "--sequence"),
])
def test_usage_errors_name_the_flag(capsys, argv, flag):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert flag in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["ball", "--family", "comb"])
    assert e.value.code == 2
    assert "--center" in capsys.readouterr().err
    with pytest.raises(SystemExit) as e:
        cli.main(["weak-norm", "--family", "comb", "--fn", "delta@(0,0)", "--lambda-floor", "x"])
    assert e.value.code == 2


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("MAXGRAPH_THREADS", "zero")
    code, _, err = run(capsys, "ball", "--family", "comb", "--center", "(0,0)", "--radius", "1")
    assert code == 2 and "MAXGRAPH_THREADS" in err
    with pytest.raises(ValueError):
        threads_from_env()
    monkeypatch.setenv("MAXGRAPH_THREADS", "3")
    assert threads_from_env() == 3


def test_reports_identical_across_thread_counts(capsys, monkeypatch):
    outs = []
    for n in ("1", "4"):
        monkeypatch.setenv("MAXGRAPH_THREADS", n)
        code, out, _ = run(capsys, "verify", "prop-3.4-ii", "--seed", "7")
        outs.append(out)
    assert outs[0] == outs[1]
    ids = ["prop-3.1-i", "prop-3.3-i", "prop-3.5-i", "prop-3.2-iv"]
    a = [dumps(to_jsonable(r.as_dict())) for r in run_many(ids, Context(seed=5), 1)]
    b = [dumps(to_jsonable(r.as_dict())) for r in run_many(ids, Context(seed=5), 3)]
    assert a == b


def test_seeded_rngs_are_reproducible():
    c = Context(seed=42)
    assert c.rng("x").random() == Context(seed=42).rng("x").random()
    assert c.rng("x").random() != c.rng("y").random()


def test_failing_step_is_isolated():
    s = suite("test-isolation", "none", "a raising step does not stop the suite")

    @s.step("boom")
    def _(ctx):
        raise RuntimeError("kaboom")

    @s.step("fine")
    def _(ctx):
        return PASS, {}

    try:
        rep = run_suite("test-isolation")
        assert [st.status for st in rep.steps] == [FAIL, PASS]
        assert "kaboom" in rep.steps[0].detail["error"]
        assert rep.status == "FAILURE"
    finally:
        del SUITES["test-isolation"]


def test_resolve():
    assert resolve("prop-3.2-overlap") == "prop-3.2-ii"
    with pytest.raises(KeyError):
        resolve("bogus")


def test_run_config_validation():
    cfg = RunConfig.for_family("comb")
    assert cfg.window_radius == DEFAULTS["comb"]["window_radius"]
    assert "threads" not in cfg.describe()
    for bad in [dict(seed=-1), dict(seed=2**64), dict(lambda_floor=0), dict(max_members=0),
                dict(output_format="xml"), dict(window_radius=-1)]:
        with pytest.raises(ValueError):
            RunConfig.for_family("comb", **bad)


def test_serialization_helpers():
    assert rational(Fraction(4, 2)) == "2/1"
    assert to_jsonable({(1, 2): {3, 1}, "q": Fraction(1, 3), "x": float("inf")}) == {
        "(1,2)": [1, 3], "q": "1/3", "x": "inf"}
    assert curve_csv([(Fraction(1, 2), 3)]) == "lambda,count,product\n1/2,3,3/2\n"
    rep = envelope("ball", {"seed": 0, "defaults_version": "v"}, {"a": 1},
                   steps=[{"name": "s", "status": "NOTE", "detail": {}}])
    jsonschema.validate(rep, SCHEMA)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(dict(rep, status="maybe"), SCHEMA)
