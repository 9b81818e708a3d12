from __future__ import annotations

import io
import json

import jsonschema
import pytest

from lpadim.cli import main, schema_path
from lpadim.corpus import CORPUS_TEXT


def run(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in CORPUS_TEXT.items():
        p = tmp_path / f"{name}.graph"
        p.write_text(text)
        paths[name] = str(p)
    e = tmp_path / "e.json"
    e.write_text(json.dumps({"n": 1, "k": 1, "blocks": [[["1", "1+x"], ["0", "0"]]]}))
    paths["e"] = str(e)
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"n": 1, "k": 1, "elements": [["v"]]}))
    paths["f"] = str(f)
    pres = tmp_path / "pres.json"
    pres.write_text(json.dumps({"n": 1, "relations": {"k": 1, "elements": [["3*v + l + l*"]]}}))
    paths["pres"] = str(pres)
    bad = tmp_path / "bad.graph"
    bad.write_text("vertices: u v\nedge t u -> v\n")
    paths["bad"] = str(bad)
    badjson = tmp_path / "bad.json"
    badjson.write_text("{not json")
    paths["badjson"] = str(badjson)
    return paths


def validate(command: str, text: str) -> dict:
    doc = json.loads(text)
    schema = json.loads(schema_path(command).read_text())
    jsonschema.validate(doc, schema)
    return doc


def test_analyze(files):
    code, out, _ = run("analyze", files["G_tail"])
    assert code == 0 and "extending: true" in out
    code, out, _ = run("analyze", files["G_rose2"])
    assert code == 0 and "extending: false" in out
    code, out, _ = run("analyze", files["G_tail"], "--json")
    doc = validate("analyze", out)
    assert doc["extending_verdict"] is True and doc["no_exit"] is True


def test_parse_error_has_position(files):
    code, _, err = run("analyze", files["bad"])
    assert code == 3 and "line 2" in err and "column" in err


def test_usage_errors(files):
    assert run("analyze")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("reduce", files["G_tail"])[0] == 2
    assert run("analyze", "/nonexistent/graph")[0] == 2
    assert run("analyze", files["G_tail"], "--field", "RR")[0] == 2


def test_structure(files):
    code, out, _ = run("structure", files["G_cyc2"])
    assert code == 0 and out.splitlines()[0] == "M_2(K[x,x^-1])"
    validate("structure", run("structure", files["G_cyc2"], "--json")[1])
    code, _, err = run("structure", files["G_rose2"])
    assert code == 4 and "NotNoExit" in err


def test_reduce(files):
    for strategy in ("innermost", "outermost"):
        code, out, _ = run("reduce", files["G_tail"], "-e", "t.l.l*.t*", "--strategy", strategy)
        assert code == 0 and out.splitlines()[0] == "u"
    doc = validate("reduce", run("reduce", files["G_tail"], "-e", "t.l.t*", "--json")[1])
    assert doc["normal_form"] == "t.l.t*" and "phi" in doc
    doc = validate("reduce", run("reduce", files["G_rose2"], "-e", "b.b*", "--json")[1])
    assert doc["normal_form"] == "v - a.a*" and "phi" not in doc
    assert run("reduce", files["G_tail"], "-e", "t..l")[0] == 3


def test_dim(files):
    code, out, _ = run("dim", files["G_tail"], "--idempotent", files["e"])
    assert code == 0 and out.splitlines()[0] == "1/2"
    doc = validate("dim", run("dim", files["G_tail"], "--idempotent", files["e"], "--json")[1])
    assert doc["dim"]["blocks"][0]["value"] == "1/2" and doc["simple_order"] == 2
    doc = validate("dim", run("dim", files["G_tail"], "--presentation", files["pres"], "--json")[1])
    assert doc["dim"] == doc["dim_over_q"] and doc["torsion_factors"] == [["1+3*x+x^2"]]
    code, _, err = run("dim", files["G_tail"], "-e", "u + v + t")
    assert code == 4 and "NotIdempotent" in err
    assert run("dim", files["G_tail"], "-e", "u", "--field", "F5")[0] == 4
    assert run("dim", files["G_tail"], "--idempotent", files["badjson"])[0] == 3


def test_closure(files):
    code, out, _ = run("closure", files["G_tail"], "-e", "3*v + l + l*")
    assert code == 0 and "dim: 1/2" in out
    doc = validate("closure", run("closure", files["G_tail"], "-e", "3*v + l + l*", "--json")[1])
    assert doc["ranks"] == [1]
    assert run("closure", files["G_tail"])[0] == 2


def test_equiv(files):
    code, out, _ = run("equiv", files["G_tail"], files["e"], files["f"])
    assert code == 0 and "x:" in out and "y:" in out
    doc = validate("equiv", run("equiv", files["G_tail"], "--p-element", "u", "--q-element", "v", "--star", "--json")[1])
    assert doc["algebraic"]["status"] == "equivalent" and doc["star"]["status"] == "equivalent"
    doc = validate("equiv", run("equiv", files["G_tail"], "--p-element", "u", "--q-element", "u + v", "--star", "--json")[1])
    assert doc["algebraic"]["status"] == "not_equivalent" and doc["star"]["status"] == "not_equivalent"
    # e is idempotent but not a projection
    assert run("equiv", files["G_tail"], files["e"], files["f"], "--star")[0] == 4


def test_axioms(files):
    code, out, _ = run("axioms", files["G_tail"], "--samples", "3", "--seed", "5")
    assert code == 0 and "# seed: 5" in out
    doc = validate("axioms", run("axioms", files["G_tail"], "--samples", "3", "--json")[1])
    assert doc["ok"] and doc["seed"] == 0
    assert run("axioms", files["G_rose2"], "--samples", "1")[0] == 4


def test_matrix_graph(files):
    code, out, _ = run("matrix-graph", files["G_sink"], "-n", "2")
    assert code == 0
    assert out == "vertices: v v_1\nedge v_e1: v_1 -> v\n"
    validate("matrix-graph", run("matrix-graph", files["G_sink"], "-n", "2", "--json")[1])
    assert run("matrix-graph", files["G_sink"], "-n", "0")[0] == 2


def test_worked_example_command():
    code, out, _ = run("paper-example")
    lines = out.splitlines()
    assert code == 0
    assert sum(line.startswith("✓") for line in lines) == 6
    assert "d(e) = 1/2" in out
    doc = validate("paper-example", run("paper-example", "--json")[1])
    assert len(doc["checks"]) == 6 and doc["verdict"] == "not_rickart_star"


@pytest.mark.parametrize(
    "argv",
    [
        ("axioms", "G_tail", "--samples", "4", "--seed", "3"),
        ("equiv", "G_tail", "--p-element", "u", "--q-element", "v", "--star"),
        ("dim", "G_tail", "--presentation", "pres"),
    ],
)
def test_json_is_byte_identical(files, argv):
    argv = [files.get(a, a) for a in argv] + ["--json"]
    a, b = run(*argv), run(*argv)
    assert a[0] == 0 and a == b
