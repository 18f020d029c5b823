import json

import pytest

from covertkey.cli import (EXIT_BUDGET, EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE,
                           EXIT_VALIDATION, data_path, main)
from covertkey.channel import dump_channel, table1_channel


def test_usage_errors(tmp_path, capsys):
    assert main(["no-such-command"]) == EXIT_USAGE
    assert main(["region-csk", "--grid", "0", "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["simulate", "--rho", "0.5", "0.6", "--out", str(tmp_path)]) == EXIT_USAGE


def test_validation_exit(tmp_path):
    bad = tmp_path / "bad.json"
    doc = json.loads(dump_channel(table1_channel(1)))
    doc["w_z"] = {k: doc["w_z"]["0,0"] for k in doc["w_z"]}
    bad.write_text(json.dumps(doc))
    code = main(["region-csk", "--channel", str(bad), "--grid", "11", "--out", str(tmp_path / "o")])
    assert code == EXIT_VALIDATION


def test_infeasible_and_budget_exits(tmp_path):
    assert main(["simulate", "--n", "16", "--mode", "mc", "--trials", "10", "--seed", "1",
                 "--out", str(tmp_path / "a")]) == EXIT_INFEASIBLE
    assert main(["simulate", "--n", "12", "--sizes", "4,4,4", "4,4,4", "--mode", "exact",
                 "--seed", "1", "--out", str(tmp_path / "b")]) == EXIT_BUDGET


def test_simulate_writes_both_sections(tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", "--n", "4", "--sizes", "2,2,2", "2,2,2", "--trials", "2000",
                 "--seed", "7", "--out", str(out)]) == EXIT_OK
    doc = json.loads((out / "simulate.json").read_text())
    assert {"exact", "monte_carlo", "config"} <= set(doc)
    assert doc["config"]["seed"] == 7
    assert (out / "simulate.csv").exists()
    man = json.loads((out / "simulate_manifest.json").read_text())
    assert set(man["outputs"]) == {"simulate.json", "simulate.csv"}


def test_replay_reproduces_outputs(tmp_path):
    first = tmp_path / "first"
    assert main(["simulate", "--n", "4", "--sizes", "2,2,2", "2,2,2", "--trials", "500",
                 "--out", str(first)]) == EXIT_OK
    second = tmp_path / "second"
    assert main(["replay", str(first / "simulate_manifest.json"), "--out", str(second)]) == EXIT_OK
    for name in ("simulate.json", "simulate.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_replay_detects_changed_channel(tmp_path):
    ch = tmp_path / "ch.json"
    ch.write_text(dump_channel(table1_channel(1)))
    out = tmp_path / "r"
    assert main(["verify-expansions", "--channel", str(ch), "--out", str(out)]) == EXIT_OK
    ch.write_text(dump_channel(table1_channel(2)))
    assert main(["replay", str(out / "verify-expansions_manifest.json")]) == EXIT_VALIDATION


def test_verify_expansions_pass(tmp_path):
    assert main(["verify-expansions", "--out", str(tmp_path)]) == EXIT_OK
    doc = json.loads((tmp_path / "expansions.json").read_text())
    assert doc["all_passed"] is True


def test_examples_match_shipped_fixtures(tmp_path):
    out = tmp_path / "ex"
    assert main(["examples", "--out", str(out), "--trials", "500"]) == EXIT_OK
    for which in (1, 2):
        name = f"table1_channel{which}.json"
        assert (out / name).read_bytes() == data_path(name).read_bytes()
    assert (out / "csk_channel1" / "csk_inner.csv").exists()


def test_bounds_and_regions(tmp_path):
    assert main(["bounds", "--n", "8", "--policy", "relaxed", "--n-list", "8", "10",
                 "--out", str(tmp_path / "b")]) == EXIT_OK
    doc = json.loads((tmp_path / "b" / "bounds.json").read_text())
    assert "config" in doc
    assert main(["region-wsk", "--channel", "table1-2", "--grid", "11",
                 "--out", str(tmp_path / "w")]) == EXIT_OK


@pytest.mark.parametrize("cmd", ["region-csk", "decay"])
def test_help_is_available(cmd, capsys):
    assert main([cmd, "--help"]) == EXIT_OK
    assert "--channel" in capsys.readouterr().out
