import json

import numpy as np
import pytest

from regdigraph.cli import main
from regdigraph.core import from_json_dict


@pytest.fixture()
def matrix_file(tmp_path, capsys):
    path = tmp_path / "mats.json"
    rc = main(["sample", "--n", "12", "--d", "3", "--seed", "5", "--count", "2",
               "--out", str(path)])
    assert rc == 0
    mats = json.loads(path.read_text())
    single = tmp_path / "one.json"
    single.write_text(json.dumps(mats[0]))
    return single


def test_sample_writes_valid_matrices(matrix_file):
    M = from_json_dict(json.loads(matrix_file.read_text()))
    assert M.n == 12 and M.d == 3


def test_sample_is_deterministic(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    main(["sample", "--n", "8", "--d", "2", "--seed", "3", "--out", str(out1)])
    main(["sample", "--n", "8", "--d", "2", "--seed", "3", "--out", str(out2)])
    assert out1.read_text() == out2.read_text()


def test_spectra_subcommand(matrix_file, capsys):
    rc = main(["spectra", "--in", str(matrix_file), "--shift-re", "0.25",
               "--shift-im", "0.1", "--dense"])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["method"] == "dense"
    assert 0 <= rep["s_min"] <= rep["s_max"]
    assert len(rep["v_min"]) == 12


def test_taxonomy_and_classify(tmp_path, capsys):
    rc = main(["taxonomy", "--n", "2000", "--d", "1000", "--a1", "784",
               "--a2", "28", "--a3", "1"])
    assert rc == 0
    params_json = capsys.readouterr().out
    pfile = tmp_path / "params.json"
    pfile.write_text(params_json)
    assert json.loads(params_json)["p"] == 2

    vec = {"coords": [[1.0, 0.0]] * 2000}
    vfile = tmp_path / "vec.json"
    vfile.write_text(json.dumps(vec))
    rc = main(["classify", "--params", str(pfile), "--vector", str(vfile)])
    assert rc == 0
    cls = json.loads(capsys.readouterr().out)
    assert cls["label"] == "almost_constant_sloping"


def test_events_subcommands(matrix_file, capsys):
    rc = main(["events", "--in", str(matrix_file), "--check", "omega1",
               "--eps", "0.4"])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["event"] == "Omega1"

    rc = main(["events", "--in", str(matrix_file), "--check", "omega-k-eps",
               "--k", "2", "--eps", "0.3", "--exact"])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["event"] == "OmegaKEps" and rep["verdict"] in ("holds", "fails")

    rc = main(["events", "--in", str(matrix_file), "--check", "zero-minor",
               "--alpha", "0.5", "--beta", "0.5", "--exact"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["event"] == "Omega0"


def test_lo_exact_and_mc(capsys):
    rc = main(["lo", "--m", "4", "--t", "1.0", "--exact"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["probability"] == pytest.approx(0.375)

    rc = main(["lo", "--m", "4", "--t", "1.0", "--mc", "20000", "--seed", "1"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert abs(out["estimate"] - 0.375) <= 3 * out["stderr"] + 1e-9


def test_campaign_roundtrip(tmp_path, capsys):
    cfg = {"n": 10, "d": 1, "z": [[0.0, 0.0]], "trials": 3, "master_seed": 1,
           "burn_in": 200, "checks": [{"check": "omega1", "eps": 0.4}]}
    cfile = tmp_path / "cfg.json"
    cfile.write_text(json.dumps(cfg))
    out_csv = tmp_path / "res.csv"
    out_jsonl = tmp_path / "res.jsonl"
    rc = main(["campaign", "--config", str(cfile), "--out", str(out_csv),
               "--records", str(out_jsonl)])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["overall_success_fraction"] == 1.0
    lines = out_jsonl.read_text().strip().splitlines()
    assert len(lines) == 3
    assert out_csv.read_text().splitlines()[0].startswith("trial,seed,n,d")


def test_campaign_exit_code_on_confirmed_red_event(tmp_path, capsys):
    # (n=10, d=3, master_seed=1) deterministically samples a singular matrix
    # at trial 0; inside the probe window that is a confirmed counterexample
    cfg = {"n": 10, "d": 3, "z": [[0.0, 0.0]], "trials": 1, "master_seed": 1,
           "burn_in": 200, "checks": []}
    cfile = tmp_path / "cfg.json"
    cfile.write_text(json.dumps(cfg))
    rc = main(["campaign", "--config", str(cfile), "--out", str(tmp_path / "r.csv"),
               "--records", str(tmp_path / "r.jsonl")])
    assert rc == 2
    summary = json.loads(capsys.readouterr().out)
    assert len(summary["red_events"]) == 1
