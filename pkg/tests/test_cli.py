import json
import os

import pytest

from bkclab.cli import main, parse_weight, run_case

CFG = """
seed = 3
format = "json"

[[runs]]
group = "GL2"
p = 5
lambda = [2, 0]
mu = "all"
"""


def test_parse_weight():
    assert parse_weight("2,0") == (2, 0)
    assert parse_weight("-1,4") == (-1, 4)


def test_check_exit_codes(capsys):
    assert main(["check", "--group", "GL2", "--p", "2"]) == 0
    assert main(["check", "--group", "A1sc", "--p", "2"]) == 2
    out = capsys.readouterr().out
    assert "t_adapted_exists: False" in out


def test_check_json(capsys):
    assert main(["check", "--group", "G2", "--p", "3", "--json"]) == 2
    doc = json.loads(capsys.readouterr().out)
    assert doc["flags"]["p_good"] is False


def test_bk_golden_p2(capsys):
    code = main(
        [
            "bk",
            "--group",
            "GL2",
            "--p",
            "2",
            "--lambda",
            "2,0",
            "--mu",
            "1,1",
            "--deterministic",
        ]
    )
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    rep = doc["runs"][0]["reports"][0]
    assert rep["jump_polynomial"] == ["1", "1"]
    assert rep["q_analogue"] == ["0", "1"]
    assert rep["costalk"] == [["0", "1"], ["2", "1"]]
    assert doc["runs"][0]["tilting_dimension"] == "4"


def test_bk_golden_p5(capsys):
    code = main(
        [
            "bk",
            "--group",
            "GL2",
            "--p",
            "5",
            "--lambda",
            "2,0",
            "--mu",
            "1,1",
            "--deterministic",
        ]
    )
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    rep = doc["runs"][0]["reports"][0]
    assert rep["jump_polynomial"] == ["0", "1"]
    assert rep["flags"]["char0_match"] is True


def test_bk_hypothesis_failure():
    assert main(["bk", "--group", "GL3", "--p", "2", "--lambda", "1,0,0"]) == 2


def test_bk_empty_weight_space(capsys):
    code = main(
        [
            "bk",
            "--group",
            "GL2",
            "--p",
            "5",
            "--lambda",
            "2,0",
            "--mu",
            "5,5",
            "--deterministic",
        ]
    )
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    rep = doc["runs"][0]["reports"][0]
    assert rep["multiplicity"] == "0"
    assert rep["costalk"] == []


def test_qanalogue_command(capsys):
    assert main(["qanalogue", "--group", "GL2", "--lambda", "2,0", "--mu", "1,1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["q_analogue"] == ["0", "1"]


def test_usage_error():
    assert main(["bk", "--group", "GL2"]) == 1
    assert main(["check", "--group", "E8", "--p", "5"]) == 1


def test_verify_deterministic_and_cached(tmp_path):
    cfg = tmp_path / "sweep.toml"
    cfg.write_text(CFG)
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    cache = tmp_path / "cache"
    argv = [
        "verify",
        "--config",
        str(cfg),
        "--deterministic",
        "--cache-dir",
        str(cache),
    ]
    assert main(argv + ["--out", str(out1)]) == 0
    assert os.listdir(cache)  # cache populated
    assert main(argv + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    doc = json.loads(out1.read_text())
    assert doc["crosschecks"]["invmodel_match"] is True
    assert doc["crosschecks"]["sum_rule"] is True
    assert "generated_at" not in doc


def test_verify_cold_equals_warm(tmp_path):
    cfg = tmp_path / "sweep.toml"
    cfg.write_text(CFG)
    out_cold = tmp_path / "cold.json"
    out_warm = tmp_path / "warm.json"
    cache = tmp_path / "cache"
    base = ["verify", "--config", str(cfg), "--deterministic"]
    assert main(base + ["--cache-dir", str(cache), "--out", str(out_cold)]) == 0
    assert main(base + ["--cache-dir", str(cache), "--out", str(out_warm)]) == 0
    assert out_cold.read_bytes() == out_warm.read_bytes()


def test_csv_render(capsys):
    code = main(
        [
            "bk",
            "--group",
            "GL2",
            "--p",
            "2",
            "--lambda",
            "2,0",
            "--mu",
            "1,1",
            "--deterministic",
            "--format",
            "csv",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "group,p,lambda,mu,n,g_n,degree,q_coeff"
    assert out[1] == 'GL2,2,"2,0","1,1",0,1,0,0'
    assert out[2] == 'GL2,2,"2,0","1,1",1,1,2,1'


def test_run_case_all_mu():
    run = run_case(
        {
            "group": "GL3",
            "p": 7,
            "lam": [1, 1, 0],
            "mu": "all",
            "seed": 0,
            "invmodel": True,
            "routes": True,
        }
    )
    assert run["route"] == "lowest-alcove"
    assert run["route_consistency"] is True
    mus = [rep["mu"] for rep in run["reports"]]
    assert ["1", "1", "0"] in mus
    for rep in run["reports"]:
        assert rep["flags"]["invmodel_match"] is True
