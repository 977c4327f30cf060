import csv
import io
import json
import subprocess
import sys

import pytest

from ricompact.classify import EmbeddingQuery
from ricompact.cli import CSV_COLUMNS, SCHEMA, main
from ricompact.rinorm import SpaceSpec

GAUSS_QUERY = {"domain": {"kind": "product", "phi": {"family": "gauss"}, "n": 3}, "m": 1,
               "X": {"family": "lebesgue", "p": 2}, "Y": {"family": "lebesgue", "p": 2}}
H1_PROBE = {"op": {"kind": "H", "j": 1, "J": {"family": "constant"}},
            "X": {"family": "lebesgue", "p": 1}, "Y": {"family": "lebesgue", "p": "inf"}}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_gauss(capsys):
    code, out, _ = run(capsys, "classify", "-i", json.dumps(GAUSS_QUERY))
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == SCHEMA and doc["compact"] == "yes"
    assert doc["rule"].startswith("Thm (lebesgue)")


def test_classify_from_file(tmp_path, capsys):
    src = tmp_path / "q.json"
    src.write_text(json.dumps({"schema": SCHEMA, **GAUSS_QUERY}))
    dst = tmp_path / "v.json"
    code, out, _ = run(capsys, "classify", "-i", src, "-o", dst)
    assert code == 0 and out == ""
    assert json.loads(dst.read_text())["compact"] == "yes"


def test_classify_out_of_scope(capsys):
    q = dict(GAUSS_QUERY, domain={"kind": "mazya_class", "alpha": "9/10", "n": 2}, m=2,
             X={"family": "lorentz_zygmund", "p": 1, "q": 1, "alpha": 0.5})
    code, out, _ = run(capsys, "classify", "-i", json.dumps(q))
    assert code == 3
    doc = json.loads(out)
    assert doc["compact"] == "out_of_scope" and doc["suggestion"]


def test_probe_csv(tmp_path, capsys):
    dst = tmp_path / "curve.csv"
    code, _, _ = run(capsys, "probe", "-i", json.dumps(H1_PROBE), "-o", dst, "--grid", 16)
    assert code == 0
    rows = list(csv.reader(io.StringIO(dst.read_text())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 17
    for a, lo, est, cite in rows[1:]:
        assert float(lo) == pytest.approx(1.0, rel=1e-9)
        assert float(est) >= float(lo)
        assert cite.startswith("Thm")


def test_probe_json_hint(capsys):
    code, out, _ = run(capsys, "probe", "-i", json.dumps(H1_PROBE), "--grid", 16)
    doc = json.loads(out)
    assert code == 0 and doc["hint"] == "bounded_below"
    assert doc["grid"] == 16 and doc["seed"] == 0
    assert SpaceSpec.from_dict(doc["X"]) == SpaceSpec.lebesgue(1)


def test_probe_budget_exhausted(capsys):
    code, out, _ = run(capsys, "probe", "-i", json.dumps(dict(H1_PROBE, budget=10)), "--grid", 8)
    assert code == 4
    assert any(json.loads(out)["budget_exhausted"])


def test_probe_deterministic(capsys):
    req = json.dumps(dict(H1_PROBE, Y={"family": "lorentz", "p": 3, "q": 2}))
    outs = [run(capsys, "probe", "-i", req, "--grid", 12, "--seed", 3, "--format", "csv")[1]
            for _ in range(2)]
    assert outs[0] == outs[1]


def test_probe_grid_env(monkeypatch, capsys):
    monkeypatch.setenv("RICOMPACT_GRID", "9")
    _, out, _ = run(capsys, "probe", "-i", json.dumps(H1_PROBE))
    assert len(json.loads(out)["a"]) == 9


@pytest.mark.parametrize("payload, field", [
    ("{not json", "input"),
    (json.dumps(dict(GAUSS_QUERY, X={"family": "lebesgue", "p": 0.5})), "X.p"),
    (json.dumps(dict(GAUSS_QUERY, schema="ri-compact/0")), "schema"),
    (json.dumps({k: v for k, v in GAUSS_QUERY.items() if k != "m"}), "m"),
    (json.dumps(dict(GAUSS_QUERY, domain={"kind": "torus"})), "domain"),
])
def test_schema_errors(capsys, payload, field):
    code, out, err = run(capsys, "classify", "-i", payload)
    assert code == 2 and out == ""
    assert f"error: {field}" in err


def test_malformed_json_no_partial_output(tmp_path):
    dst = tmp_path / "out.json"
    proc = subprocess.run([sys.executable, "-m", "ricompact", "classify", "-i", "{", "-o", str(dst)],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stdout == "" and not dst.exists()


def test_norm_and_associate(capsys):
    req = {"space": {"family": "lorentz", "p": 2, "q": 1},
           "f": {"breakpoints": [0, 0.25, 1], "values": [1, 0]}, "associate": True}
    code, out, _ = run(capsys, "norm", "-i", json.dumps(req))
    doc = json.loads(out)
    assert code == 0
    assert doc["norm"]["value"] == pytest.approx(1.0)
    assert doc["norm"]["exactness"] == "exact"
    # the associate norm of chi_(0,a) is a / phi_X(a)
    assert doc["associate"]["lower_bound"] == pytest.approx(0.25, rel=1e-9)
    code, out, _ = run(capsys, "norm", "-i", json.dumps(dict(req, budget=200)))
    assert code == 4 and json.loads(out)["associate"]["budget_exhausted"]


def test_norm_bad_step(capsys):
    req = {"space": {"family": "lebesgue", "p": 2}, "f": {"breakpoints": [0, 0.5], "values": [1]}}
    code, _, err = run(capsys, "norm", "-i", json.dumps(req))
    assert code == 2 and "f.breakpoints" in err


def test_apply(capsys):
    req = {"op": {"kind": "T", "m": 2, "alpha": 1},
           "f": {"breakpoints": [0, 1], "values": [1]}, "t": [0.36787944117144233, 1.0]}
    code, out, _ = run(capsys, "apply", "-i", json.dumps(req))
    doc = json.loads(out)
    assert code == 0 and doc["nonincreasing"] and doc["exactness"] == "exact"
    assert doc["values"][0] == pytest.approx(0.5)
    assert doc["values"][1] == 0.0


def test_apply_bad_operator(capsys):
    req = {"op": {"kind": "Q", "m": 1, "n": 1}, "f": {"breakpoints": [0, 1], "values": [1]}}
    code, _, err = run(capsys, "apply", "-i", json.dumps(req))
    assert code == 2 and "op.n" in err


def test_domain_tables(capsys):
    code, out, _ = run(capsys, "domain", "-i", json.dumps(
        {"domain": {"kind": "product", "phi": {"family": "boltzmann", "beta": 1}, "n": 2},
         "t": [0.01, 0.5]}))
    doc = json.loads(out)
    assert code == 0 and doc["regime"] == "positive_limit(1)"
    assert doc["table"]["L_phi"] == pytest.approx([0.01, 0.5])
    code, out, _ = run(capsys, "domain", "-i", json.dumps(
        {"domain": {"kind": "mazya_model", "alpha": "1/2", "n": 2}}))
    doc = json.loads(out)
    assert doc["eta"]["r"][-1] == 2.0 and doc["eta"]["eta"][-1] == 0.0
    assert doc["compatible"]["C3"] is True


def test_verdict_round_trip(capsys):
    _, out, _ = run(capsys, "classify", "-i", json.dumps(GAUSS_QUERY))
    doc = json.loads(out)
    assert doc["optimal_range"] is None or SpaceSpec.from_dict(doc["optimal_range"])
    q = EmbeddingQuery.from_dict(GAUSS_QUERY)
    assert json.loads(json.dumps(q.to_dict())) == q.to_dict()


def test_selftest_single_suite(capsys):
    code, out, _ = run(capsys, "selftest", "--suite", "closed_form")
    assert code == 0 and out.startswith("PASS  closed_form")
    code, out, _ = run(capsys, "selftest", "--suite", "geometry", "--format", "json")
    assert json.loads(out)["results"][0]["passed"]
    code, _, err = run(capsys, "selftest", "--suite", "nope")
    assert code == 2 and "suite" in err
