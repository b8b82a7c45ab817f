import io
import json
import subprocess
import sys

import pytest

from coxdecomp import cli
from coxdecomp.coxeter import CoxeterSystem
from coxdecomp.errors import ParseError, ValidationError
from coxdecomp.exact import INF

B3_FILE = CoxeterSystem([[1, 3, 2], [3, 1, 4], [2, 4, 1]])


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return {
        "a2": write("a2.cox", "2\n1 3\n3 1\n"),
        "a1t": write("a1t.cox", "2\n1 inf\ninf 1\n"),
        "b3": write("b3.cox", "3\n1 3 2\n3 1 4\n2 4 1\n"),
        "a2t": write("a2t.cox", "3\n1 3 3\n3 1 3\n3 3 1\n"),
        "asym": write("asym.cox", "2\n1 3\n4 1\n"),
        "token": write("token.cox", "2\n1 x\n3 1\n"),
        "rows": write("rows.cox", "3\n1 3 2\n3 1 3\n"),
        "diag": write("diag.cox", "2\n2 3\n3 1\n"),
        "trivial": write("trivial.tab", "1\n0\n"),
        "z2": write("z2.tab", "2\n0 1\n1 0\n"),
        "loop": write("loop.tab", "5\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0\n"),
        "range": write("range.tab", "2\n0 1\n1 2\n"),
        "notid": write("notid.tab", "2\n1 0\n0 1\n"),
        "tmp": tmp_path,
    }


def test_parse_coxeter_examples():
    assert cli.parse_coxeter_text("2\n1 3\n3 1") == CoxeterSystem([[1, 3], [3, 1]])
    assert cli.parse_coxeter_text("2\n1 inf\ninf 1").m[0][1] == INF
    with pytest.raises(ParseError) as info:
        cli.parse_coxeter_text("2\n1 3\n4 1")
    assert "not symmetric" in str(info.value) and info.value.line == 3


def test_parse_comments_and_json():
    text = "# type B3\n3\n1 3 2  # first row\n3 1 4\n2 4 1\n"
    cs = cli.parse_coxeter_text(text)
    assert cs == B3_FILE
    assert cli.parse_coxeter_text(json.dumps(cs.to_json())) == cs


def test_parse_cayley_examples():
    assert cli.parse_cayley_text("1\n0").order == 1
    assert cli.parse_cayley_text("2\n0 1\n1 0").order == 2
    with pytest.raises(ValidationError, match=r"associativity fails at \(\d+,\d+,\d+\)"):
        cli.parse_cayley_text("5\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0\n")


@pytest.mark.parametrize(
    "key,line,col",
    [("asym", 3, 1), ("token", 2, 3), ("rows", 4, 1), ("diag", 2, 1), ("range", 3, 3)],
)
def test_parse_error_positions(files, capsys, key, line, col):
    cmd = "center" if files[key].endswith(".tab") else "classify"
    code, out, err = run([cmd, files[key]], capsys)
    assert code == 2
    rec = json.loads(out)
    assert (rec["error"], rec["line"], rec["column"]) == ("ParseError", line, col)
    assert f"line {line}, column {col}" in err


def test_named_axiom_violation(files, capsys):
    code, out, _ = run(["center", files["notid"]], capsys)
    assert code == 2 and json.loads(out)["message"].startswith("identity fails")
    code, out, _ = run(["remak", files["loop"]], capsys)
    assert code == 2 and json.loads(out)["message"].startswith("associativity fails at (")


def test_decompose_b3(files, capsys):
    code, out, _ = run(["decompose", files["b3"]], capsys)
    assert code == 0
    factors = json.loads(out)["factors"]
    assert [(f["order"], f["central"]) for f in factors] == [(2, True), (24, False)]


def test_kn_free_and_classify(files, capsys):
    code, out, _ = run(["kn-free", "--g", "2", "--n", "2"], capsys)
    assert code == 0 and json.loads(out)["k"] == 4
    code, out, _ = run(["classify", files["a2t"]], capsys)
    res = json.loads(out)
    assert (res["kind"], res["signature"]) == ("Affine", [2, 0, 1])


def test_graph_dot(files, capsys):
    code, out, _ = run(["graph", "--format", "dot", files["b3"]], capsys)
    assert code == 0 and out.startswith("graph coxeter {") and 'label="4"' in out
    code, out, _ = run(["graph", "--format", "dot", files["a1t"]], capsys)
    assert 'label="inf"' in out
    code, _, _ = run(["decompose", "--format", "dot", files["b3"]], capsys)
    assert code == 2


def test_budget_exit_codes(files, capsys, monkeypatch):
    code, out, _ = run(["build-group", "--closure-budget", "10", files["b3"]], capsys)
    assert code == 3 and json.loads(out)["partial"] == {"elements": 11}
    monkeypatch.setenv("COXDECOMP_CLOSURE_BUDGET", "10")
    code, _, _ = run(["build-group", files["b3"]], capsys)
    assert code == 3
    # flags override the environment
    code, _, _ = run(["build-group", "--closure-budget", "100", files["b3"]], capsys)
    assert code == 0
    monkeypatch.setenv("COXDECOMP_CLOSURE_BUDGET", "ten")
    code, _, _ = run(["build-group", files["b3"]], capsys)
    assert code == 2


def test_consistency_exit_code(files, capsys, monkeypatch):
    import coxdecomp.coxeter as cx

    monkeypatch.setattr(cx, "recognize", lambda cs: "~A2")
    cx._classify.cache_clear()
    try:
        code, out, _ = run(["classify", files["b3"]], capsys)
    finally:
        cx._classify.cache_clear()
    assert code == 4 and json.loads(out)["error"] == "ConsistencyError"


def test_build_group_exports_table(files, capsys):
    target = files["tmp"] / "b3.tab"
    code, out, _ = run(["build-group", files["b3"], "--cayley-out", str(target)], capsys)
    assert code == 0 and json.loads(out)["order"] == 48
    code, out, _ = run(["remak", str(target)], capsys)
    assert sorted(f["order"] for f in json.loads(out)["factors"]) == [2, 24]
    code, out, _ = run(["hypercenter", str(target)], capsys)
    assert json.loads(out)["order"] == 2
    code, out, _ = run(["kn", str(target), "--n", "2"], capsys)
    assert json.loads(out)["k"] == 4


def test_cross_validate_and_lie(files, capsys):
    code, out, _ = run(["cross-validate", files["b3"]], capsys)
    assert code == 0 and json.loads(out)["match"] is True
    code, out, _ = run(["lie-decompose", "--p", "2", "--q", "2"], capsys)
    assert json.loads(out)["dims"] == [3, 3]
    code, out, _ = run(["lie-of", "--p", "3", "--r", "1"], capsys)
    path = files["tmp"] / "of301.json"
    path.write_text(out)
    code, out, _ = run(["lie-decompose", str(path)], capsys)
    assert json.loads(out)["verdict"] == "CertifiedIndecomposable"


def test_corpus_ordering_and_determinism(files, capsys):
    inputs = [files["b3"], files["asym"], files["a2"], files["a2t"]]
    code1, out1, _ = run(["decompose", "--jobs", "2", *inputs], capsys)
    code2, out2, _ = run(["decompose", *inputs], capsys)
    assert code1 == code2 == 2
    assert out1 == out2
    res = json.loads(out1)
    assert [r["input"] for r in res] == inputs
    assert [r["exit"] for r in res] == [0, 2, 0, 0]


def test_components_round_trip(files, capsys, tmp_path):
    code, out, _ = run(["components", files["b3"]], capsys)
    sys_json = json.loads(out)["components"][0]["system"]
    p = tmp_path / "round.json"
    p.write_text(json.dumps(sys_json))
    assert cli.parse_coxeter_file(p) == B3_FILE


def test_text_format(files, capsys):
    code, out, _ = run(["decompose", "--format", "text", files["b3"]], capsys)
    assert code == 0 and "- central: True" in out and "order: 48" in out


def test_console_script_entry_point(files):
    out = subprocess.run([sys.executable, "-m", "coxdecomp.cli", "signature", files["a2t"]],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["signature"] == [2, 0, 1]


def test_run_with_config_object(files):
    cfg = cli.RunConfig("signature", (files["a2"],))
    buf = io.StringIO()
    assert cli.run(cfg, buf) == 0
    assert json.loads(buf.getvalue()) == {"rank": 2, "signature": [2, 0, 0]}
    with pytest.raises(ValidationError):
        cli.Budgets(closure=0)
