import json
from importlib import resources
from pathlib import Path

import pytest

from rcteams import io
from rcteams.cli import main

PROOFS = Path(str(resources.files("rcteams") / "fixtures" / "proofs"))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_exit_codes(capsys):
    assert run(capsys, "eval", "coin", "[A=1] C=heads")[:2] == (1, "false\n")
    assert run(capsys, "eval", str(io.fixture_path("coin")), "<A=1> C=tails")[:2] == (0, "true\n")


def test_eval_syntax_error_points_at_position(capsys):
    code, _, err = run(capsys, "eval", "coin", "[A=1 C=heads")
    assert code == 2
    assert "position 5" in err and "     ^" in err


def test_unknown_model_and_usage(capsys):
    assert run(capsys, "eval", "nope", "A=1")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "--help")[0] == 0


def test_intervene_prints_document(capsys):
    code, out, _ = run(capsys, "intervene", "game", "L=1")
    doc = json.loads(out)
    assert code == 0 and doc["format"] == "rct/1"
    assert {tuple(s.values()) for s in doc["team"]} == {("1", "h", "1", "h"), ("1", "h", "1", "t"), ("1", "t", "0", "n")}
    assert "L" not in doc["laws"]
    code, out, _ = run(capsys, "intervene", "twocoin", "B=1", "--general")
    assert len(json.loads(out)["team"]) == 2


def test_intervene_recursive_flag_needs_acyclic_model(capsys, tmp_path):
    doc = {
        "format": "rct/1",
        "signature": {"variables": [{"name": "A", "values": ["0", "1"]}, {"name": "B", "values": ["0", "1"]}]},
        "laws": {"A": {"parents": ["B"], "relation": [["0", "0"]]}, "B": {"parents": ["A"], "relation": [["0", "0"]]}},
        "team": [],
    }
    path = tmp_path / "cycle.json"
    path.write_text(json.dumps(doc))
    assert run(capsys, "intervene", str(path), "A=1", "--recursive")[0] == 2
    assert run(capsys, "intervene", str(path), "A=1")[0] == 0


def test_normal_form(capsys):
    code, out, _ = run(capsys, "normal-form", "<A=1> (A=1 & C=heads)", "--model", "coin")
    assert (code, out) == (0, "<A=1> C=heads\n")
    code, out, _ = run(capsys, "normal-form", "A=1", "--sig", "A=0,1; C=h,t", "--atoms")
    assert out.count("\n  <>") == 4


def test_valid_and_entail(capsys):
    assert run(capsys, "valid", "[A=1] A=1", "--sig", "A=0,1; C=h,t")[:2] == (0, "valid (1238 models checked)\n")
    code, out, _ = run(capsys, "valid", "[A=1] C=h", "--sig", "A=0,1; C=h,t")
    assert code == 1 and out.startswith("not valid")
    code, out, _ = run(capsys, "entail", "[A=1] C!=t", "-p", "[A=1] C=h", "--sig", "A=0,1; C=h,t")
    assert code == 0 and out.startswith("entailed")
    code, out, _ = run(capsys, "valid", "[X0=1] X0=1", "--vars", "3", "--sample", "40", "--seed", "2")
    assert code == 0 and "(40 models checked)" in out


def test_sweep_reports_and_json(capsys):
    code, out, _ = run(capsys, "sweep", "--vars", "2", "--range", "2", "--class", "all", "--families", "I1,I4,I9", "--no-probes")
    assert code == 0
    assert out.strip().endswith("0 violations")
    code, out, _ = run(capsys, "sweep", "--vars", "2", "--families", "I6", "--no-probes", "--json")
    report = json.loads(out)
    assert code == 1 and report["violations"] == 904 and report["models"] == 1238


def test_sweep_honours_space_cap(capsys):
    code, _, err = run(capsys, "sweep", "--vars", "3", "--max-space", "100")
    assert code == 2 and "search space" in err


def test_direct_causes_classify_graph(capsys):
    _, out, _ = run(capsys, "direct-causes", "annbob", "C")
    assert out == "C: direct causes ['B']; declared parents ['A', 'B']; non-dummy ['B']\n"
    _, out, _ = run(capsys, "classify", "coin")
    assert out == "total: yes\ndeterministic: no\nrecursive: yes\n"
    _, out, _ = run(capsys, "graph", "annbob", "--dot")
    assert '"A" -> "C" [style=dashed];' in out and '"B" -> "C";' in out
    _, out, _ = run(capsys, "graph", "game")
    assert out == "C_L -> R\nL -> C_L\nR -> C_R\n"


def test_canonical(capsys):
    code, out, _ = run(capsys, "canonical", "twocoin")
    assert code == 0 and "diff against input: none" in out
    code, out, _ = run(capsys, "canonical", "annbob", "--samples", "0")
    assert code == 1 and "~ parents of C: ['A', 'B'] -> ['B']" in out


@pytest.mark.parametrize(
    "name, code, tail",
    [
        ("modus_ponens", 0, "|- <> T -> [A=1] A=1"),
        ("from_premise", 0, "[A=1] C=h |- [A=1] (C=h | A=0)"),
        ("bad_nec_on_assumption", 1, "proof rejected: line 2: line 1 depends on an assumption"),
    ],
)
def test_check_proof(capsys, name, code, tail):
    got, out, _ = run(capsys, "check-proof", str(PROOFS / f"{name}.prf"))
    assert got == code and out.strip().splitlines()[-1] == tail


def test_check_proof_discharge_and_signature_override(capsys):
    code, out, _ = run(capsys, "check-proof", str(PROOFS / "from_premise.prf"), "--discharge", "1")
    assert code == 0 and out.strip() == "|- [A=1] C=h -> [A=1] (C=h | A=0)"
    code, _, err = run(capsys, "check-proof", str(PROOFS / "from_premise.prf"), "--discharge", "2")
    assert code == 2 and "not an assumption" in err
    code, _, err = run(capsys, "check-proof", str(PROOFS / "modus_ponens.prf"), "--with", "twocoin")
    assert code == 2  # A is not a variable of that signature
