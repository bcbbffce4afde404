import io as stdio
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from indpoly import io
from indpoly.cli import main
from indpoly.errors import ParseError

DATA = Path(__file__).resolve().parent.parent / "data"


def run(*argv):
    out, err = stdio.StringIO(), stdio.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_graph_parsing():
    g = io.parse_graph({"n": 3, "edges": [[0, 1], [1, 2]]})
    assert g.edges() == [(0, 1), (1, 2)]
    for bad in ([], {"edges": []}, {"n": "3"}, {"n": 2, "edges": [[0, 2]]}, {"n": 2, "edges": [[0]]}):
        with pytest.raises(ParseError):
            io.parse_graph(bad)


def test_activity_parsing():
    p = io.parse_activities([0.2, {"re": 0.1, "im": -0.3}, 1], 3)
    assert list(p) == [0.2, 0.1 - 0.3j, 1]
    for bad in ([0.1], [0.1, "x", 0.2], [0.1, True, 0.2], [0.1, {"im": 1}, 0.2]):
        with pytest.raises(ParseError):
            io.parse_activities(bad, 3)


def test_bad_json_and_missing_file(tmp_path):
    f = tmp_path / "g.json"
    f.write_text("{not json")
    with pytest.raises(ParseError):
        io.load_graph(f)
    with pytest.raises(ParseError):
        io.load_graph(tmp_path / "missing.json")


def test_dimacs():
    text = "c comment\np cnf 4 3\n1 -2\n 3 0\n-4 0 2 0\n%\n0\n"
    m, clauses = io.parse_dimacs(text)
    assert m == 4 and clauses == [[1, -2, 3], [-4], [2]]


@pytest.mark.parametrize(
    "text",
    ["1 2 0\n", "p cnf 2 1\n1 3 0\n", "p cnf 2 2\n1 0\n", "p cnf 2 1\n1 2\n", "p cnf x 1\n1 0\n", "p cnf 2 1\n1 a 0\n"],
)
def test_dimacs_errors(text):
    with pytest.raises(ParseError):
        io.parse_dimacs(text)


def test_model_parsing_and_round_trip():
    vm = io.load_model(DATA / "path_model.json")
    assert vm.m == 4 and len(vm.events) == 3
    again = io.parse_model(json.loads(io.dumps(io.model_to_dict(vm))))
    assert list(again.probabilities()) == list(vm.probabilities())
    assert io.parse_model({"m": 2, "events": [{"clause": [1]}]}).z.tolist() == [0.5, 0.5]
    for bad in ({"m": 2}, {"m": -1, "events": []}, {"m": 2, "events": [{"foo": 1}]}, {"m": 1, "events": [{"clause": [3]}]}):
        with pytest.raises(ParseError):
            io.parse_model(bad)


@settings(max_examples=100)
@given(st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_complex_encoding_round_trips(z):
    assert io.decode_complex(json.loads(io.dumps(io.encode_complex(z)))) == z


@settings(max_examples=100)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=5))
def test_csv_floats_round_trip(xs):
    body = io.rows_to_csv(["x"], [[x] for x in xs]).splitlines()[1:]
    assert [float(s) for s in body] == [float(x) for x in xs]


def test_cli_eval_exact():
    code, out, _ = run("eval", "--graph", DATA / "p3.json", "--activities", DATA / "p3_activities.json", "--exact")
    assert code == 0
    res = json.loads(out)
    assert res["value"]["re"] == pytest.approx(0.44) and res["value"]["im"] == 0


def test_cli_eval_decay_complex():
    code, out, _ = run(
        "eval", "--graph", DATA / "k2.json", "--activities", DATA / "k2_complex.json", "--depth", "2", "--threads", "1"
    )
    res = json.loads(out)
    assert code == 0 and res["mode"] == "decay"
    assert complex(res["value"]["re"], res["value"]["im"]) == pytest.approx(1 - 0.6j, abs=1e-15)
    code, out, _ = run("eval", "--graph", DATA / "k2.json", "--activities", DATA / "k2_complex.json", "--alpha", ".5")
    assert code == 0 and json.loads(out)["depth_used"] > 0


def test_cli_is_deterministic_across_threads():
    args = ["eval", "--graph", DATA / "p3.json", "--activities", DATA / "p3_activities.json", "--alpha", ".5"]
    assert run(*args, "--threads", "1")[1] == run(*args, "--threads", "2")[1] == run(*args, "--threads", "1")[1]


def test_cli_membership_and_threshold():
    code, out, _ = run("membership", "--graph", DATA / "p3.json", "--activities", DATA / "p3_activities.json", "--alpha", ".1")
    assert code == 0 and json.loads(out)["verdict"] == "IN_REGION"
    code, out, _ = run("threshold", "--graph", DATA / "k2.json", "--alpha", ".05", "--exact")
    res = json.loads(out)
    assert res["lo"] <= 0.5 <= res["hi"]


def test_cli_lll():
    code, out, _ = run("lll", "--cnf", DATA / "trivial.cnf", "--alpha", ".5", "--threads", "1")
    res = json.loads(out)
    assert code == 0 and res["verify"] and res["assignment"] != [0, 0, 0]
    code, out, _ = run("lll", "--model", DATA / "path_model.json", "--exact")
    assert code == 0 and json.loads(out)["verify"]


def test_cli_decay(tmp_path):
    summary = tmp_path / "fit.json"
    code, out, err = run("decay", "--d", "2", "--alphas", "1e-2,1e-3", "--summary", summary)
    assert code == 0 and err == ""
    lines = out.strip().splitlines()
    assert lines[0] == "alpha,rho,one_minus_rho" and len(lines) == 3
    assert json.loads(summary.read_text())["fitted_exponent"] == pytest.approx(0.5, abs=0.05)
    code, out, err = run("decay", "--d", "2", "--alphas", "1e-2,1e-3")
    assert "fitted_exponent" in json.loads(err)


def test_cli_output_file(tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run("eval", "--graph", DATA / "k2.json", "--activities", DATA / "k2_complex.json", "--exact", "-o", target)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["mode"] == "exact"


@pytest.mark.parametrize(
    "argv,kind",
    [
        (["eval", "--graph", "missing.json", "--activities", "x.json", "--exact"], "parse"),
        (["eval", "--graph", DATA / "k2.json", "--activities", DATA / "p3_activities.json", "--exact"], "parse"),
        (["eval", "--graph", DATA / "k2.json", "--activities", DATA / "k2_complex.json"], "invalid-input"),
        (["membership", "--graph", DATA / "k2.json", "--activities", DATA / "k2_complex.json", "--alpha", "2"], "invalid-input"),
        (["decay", "--d", "2", "--alphas", "0.1"], "invalid-input"),
        (["eval", "--graph", DATA / "p3.json", "--activities", DATA / "p3_activities.json", "--depth", "3", "--budget", "1"], "budget"),
        (["lll", "--cnf", DATA / "trivial.cnf"], "invalid-input"),
    ],
)
def test_cli_errors(argv, kind):
    code, out, _ = run(*argv)
    assert code == 1
    assert json.loads(out)["error"]["kind"] == kind


def test_cli_usage_error_exits():
    with pytest.raises(SystemExit):
        run("decay", "--d", "2", "--alphas", "a,b")


def test_dumps_is_sorted_and_exact():
    text = io.dumps({"b": 0.1 + 0.2, "a": np.float64(1 / 3).item()})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text)["b"] == 0.1 + 0.2
