from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import pytest

import signspan.eta as eta_mod
from signspan import __version__
from signspan.cli import main, read_record, resolve_workers
from signspan.eta import basis_config, en_config


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    header = json.loads(lines[0][2:])
    return header, list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_estimate_csv_row(capsys):
    code, out, _ = run(capsys, "estimate", "--event", "kso", "-p", "4", "-n", "16", "--trials", "20000", "--seed", "7")
    assert code == 0
    header, rows = parse_csv(out)
    assert header["version"] == __version__
    assert header["config"]["seed"] == 7
    assert len(rows) == 1 and rows[0]["event"] == "kso" and rows[0]["trials"] == "20000"


def test_estimate_singular_near_half(capsys):
    code, out, _ = run(capsys, "estimate", "--event", "singular", "-n", "2", "--trials", "1000000", "--seed", "1")
    assert code == 0
    _, rows = parse_csv(out)
    assert float(rows[0]["ci_low"]) <= 0.5 <= float(rows[0]["ci_high"])


@pytest.mark.parametrize(
    "argv",
    [
        ["estimate", "--event", "kso", "-p", "4", "--trials", "10", "--seed", "1"],
        ["estimate", "--event", "kso", "-p", "4", "-n", "5", "--trials", "10"],
        ["estimate", "--event", "kso", "-n", "5", "--trials", "10", "--seed", "1"],
        ["estimate", "--event", "support", "-p", "4", "-n", "5", "--trials", "10", "--seed", "1"],
        ["exact", "--event", "kso", "-p", "9", "-n", "9"],
        ["exact", "--count", "kso-tuples"],
        ["bounds", "--n", "x..y"],
        ["verify", "--only", "no-such-check"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert "error" in err


def test_exact_outputs(capsys):
    code, out, _ = run(capsys, "exact", "--event", "kso", "-p", "2", "-n", "3")
    assert code == 0
    data = json.loads(out)
    assert data["probability"] == "0" and data["total"] == 64
    code, out, _ = run(capsys, "exact", "--delta", "-n", "2", "-k", "3")
    assert json.loads(out)["value"] == "0"
    code, out, _ = run(capsys, "exact", "--count", "kso-tuples", "-n", "2")
    assert json.loads(out)["count"] == 0
    code, out, _ = run(capsys, "exact", "--event", "singular", "-n", "2")
    assert json.loads(out)["probability"] == "1/2"


def test_exact_matrix_file(tmp_path, capsys):
    f = tmp_path / "m.txt"
    f.write_text("+++-\n+--+\n-+-+\n")
    code, out, _ = run(capsys, "exact", "--matrix", str(f))
    data = json.loads(out)
    assert code == 0 and data["kso"] and data["support"] == 3
    f.write_text("++\n+x\n")
    assert run(capsys, "exact", "--matrix", str(f))[0] == 1


def test_eta_basis_pass(tmp_path, capsys):
    f = tmp_path / "basis.json"
    f.write_text(basis_config(3).to_json())
    code, out, _ = run(capsys, "eta", str(f))
    data = json.loads(out)
    assert code == 0 and data["homology"] == 1 and data["flag_sums"] == ["1"] and data["result"] == "PASS"


def test_eta_e2_three_weight_sets(tmp_path, capsys):
    H = en_config(2)
    doc = json.loads(H.to_json())
    doc["weight_sets"] = [["1/4", "1/4", "1/4", "1/4"]]
    f = tmp_path / "e2.json"
    f.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "eta", str(f), "--weights", "3,-1,-1,0", "--field", "3")
    data = json.loads(out)
    assert code == 0
    assert data["homology"] == 3 and data["flag_sums"] == ["3", "3", "3"]


def test_eta_bad_inputs(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"points": [[1, 0], [0, 1]], "weights": [1, 1]}))
    assert run(capsys, "eta", str(f))[0] == 1
    f.write_text("{not json")
    assert run(capsys, "eta", str(f))[0] == 1
    f.write_text(basis_config(2).to_json())
    assert run(capsys, "eta", str(f), "--weights", "1,1")[0] == 1
    assert run(capsys, "eta", str(tmp_path / "missing.json"))[0] == 1


def test_bounds_rows(capsys):
    code, out, _ = run(capsys, "bounds", "--n", "2..10")
    assert code == 0
    lines = out.splitlines()
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    for name in ("schlafli_bound", "threshold_asymptote", "singular_asymptote", "kso_tuple_bound"):
        assert sum(r["name"] == name for r in rows) == 9
    assert next(r for r in rows if r["name"] == "schlafli_bound" and r["n"] == "2")["value_exact"] == "14"


def test_verify_subset_passes(capsys):
    code, out, _ = run(capsys, "verify", "--only", "theorem3", "--samples", "100", "--seed", "3")
    assert code == 0
    assert "PASS theorem3: 102 configurations" in out


def test_verify_mutation_caught(capsys, monkeypatch):
    real = eta_mod.flag_of

    def flipped(W, H, cache=None):
        f = real(W, H, cache)
        return eta_mod.FlagValue(f.q, f.product, -f.top_weight)

    monkeypatch.setattr(eta_mod, "flag_of", flipped)
    code, out, _ = run(capsys, "verify", "--only", "theorem3", "--samples", "10")
    assert code == 2
    assert "FAIL theorem3" in out


def test_eta_mutation_exit_2(tmp_path, capsys, monkeypatch):
    real = eta_mod.flag_of
    monkeypatch.setattr(
        eta_mod, "flag_of", lambda W, H, cache=None: eta_mod.FlagValue(real(W, H, cache).q, real(W, H, cache).product, Fraction(1))
    )
    f = tmp_path / "e2.json"
    f.write_text(en_config(2).to_json())
    assert run(capsys, "eta", str(f), "--weights", "2,-1,0,0")[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["estimate", "--event", "kso", "-p", "5", "-n", "9", "--trials", "9000", "--seed", "2", "--workers", "2"],
        ["estimate", "--event", "indep-support", "-p", "4", "-n", "6", "-m", "3", "--trials", "5000", "--seed", "4", "--format", "json"],
        ["exact", "--event", "rank-deficient", "-p", "3", "-n", "4"],
        ["bounds", "--n", "4..6", "-p", "4", "-m", "3"],
    ],
)
def test_rerun_reproduces_output(tmp_path, capsys, argv):
    out_file = tmp_path / "out"
    assert main(argv + ["-o", str(out_file)]) == 0
    capsys.readouterr()
    original = out_file.read_text()
    assert main(["rerun", str(out_file)]) == 0
    again = capsys.readouterr().out

    def body(text):
        # drop the embedded record (its output path differs) and compare the data
        if text.startswith("#"):
            return text.split("\n", 1)[1]
        data = json.loads(text)
        data.pop("config")
        return data

    assert body(again) == body(original)
    cfg = read_record(str(out_file))
    assert cfg.subcommand == argv[0]


def test_workers_env_and_flag(monkeypatch):
    monkeypatch.delenv("SIGNSPAN_WORKERS", raising=False)
    assert resolve_workers(None) == 1
    monkeypatch.setenv("SIGNSPAN_WORKERS", "3")
    assert resolve_workers(None) == 3
    assert resolve_workers(2) == 2
    monkeypatch.setenv("SIGNSPAN_WORKERS", "lots")
    with pytest.raises(ValueError):
        resolve_workers(None)


def test_env_workers_recorded(capsys, monkeypatch):
    monkeypatch.setenv("SIGNSPAN_WORKERS", "4")
    _, out, _ = run(capsys, "estimate", "--event", "kso", "-p", "3", "-n", "5", "--trials", "100", "--seed", "1")
    header, rows = parse_csv(out)
    assert header["config"]["workers"] == 4 and rows[0]["workers"] == "4"
