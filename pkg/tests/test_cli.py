import os

import pytest
import yaml

from fuzzdyn.cli import SEED_VARIABLE, load_options, resolve_seed, run
from fuzzdyn.errors import ConfigurationError
from fuzzdyn.io import read_csv, read_json


@pytest.fixture(autouse=True)
def no_seed_variable(monkeypatch):
    monkeypatch.delenv(SEED_VARIABLE, raising=False)


def test_resolve_seed(monkeypatch):
    assert resolve_seed(3) == 3
    assert resolve_seed(None) == 7
    monkeypatch.setenv(SEED_VARIABLE, "11")
    assert resolve_seed(None) == 11
    monkeypatch.setenv(SEED_VARIABLE, "eleven")
    with pytest.raises(ConfigurationError):
        resolve_seed(None)


def test_load_options(tmp_path):
    path = tmp_path / "run.yml"
    path.write_text(yaml.dump({"horizon": 32}))
    assert load_options(str(path), {"horizon": 8, "out": "x"}) == {"horizon": 32, "out": "x"}
    assert load_options(None, {"horizon": 8}) == {"horizon": 8}
    path.write_text(yaml.dump({"bogus": 1}))
    with pytest.raises(ConfigurationError):
        load_options(str(path), {"horizon": 8})


def test_shift_demo_writes_report_and_traces(tmp_path):
    assert run(["shift", "demo", "--out", str(tmp_path)]) == 0
    seed, report = read_json(str(tmp_path / "shift-demo.json"))
    assert seed == 7
    assert report["passed"] is True
    assert os.path.exists(tmp_path / "shift-demo-fuzzy-endograph.csv")
    _, trace = read_csv(str(tmp_path / "shift-demo-hyper.csv"))
    assert list(trace.columns) == ["j", "d_j"]


def test_bad_weight_is_a_usage_error(tmp_path):
    assert run(["shift", "demo", "--weight", "1", "--out", str(tmp_path)]) == 2


def test_shift_contraction(tmp_path):
    assert run(["shift", "contraction", "--out", str(tmp_path)]) == 0


def test_sensitivity_search_and_missing_witness(tmp_path):
    assert run(["sens", "search", "--out", str(tmp_path)]) == 0
    _, witness = read_json(str(tmp_path / "sens-shift-base.json"))
    assert witness["n"] == 5
    assert run(["sens", "search", "--epsilon", "1000", "--horizon", "4", "--out", str(tmp_path)]) == 1


def test_sensitivity_window_and_extraction(tmp_path):
    assert run(["sens", "window", "--out", str(tmp_path)]) == 0
    assert run(["sens", "extract", "--trials", "8", "--seed", "3", "--out", str(tmp_path)]) == 0


def test_pair_classify_writes_three_tables(tmp_path):
    assert run(["pair", "classify", "--example", "3", "--horizon", "1024", "--out", str(tmp_path)]) == 0
    for table, columns in (("trace", ["j", "d_j"]), ("profile", ["delta", "phi_lower", "phi_upper"]),
                           ("verdicts", ["pair_i", "pair_j", "flag", "status", "evidence"])):
        seed, frame = read_csv(str(tmp_path / f"pair-base-3-{table}.csv"))
        assert seed == 7
        assert list(frame.columns) == columns


def test_pair_classify_fuzzy_with_config_file(tmp_path):
    path = tmp_path / "pair.yml"
    path.write_text(yaml.dump({"level": "fuzzy", "metric": "endograph", "horizon": 256, "a": "0,0", "b": "3,1"}))
    assert run(["pair", "classify", "--config", str(path), "--out", str(tmp_path)]) == 0
    assert os.path.exists(tmp_path / "pair-fuzzy-endograph-1.json")
    path.write_text(yaml.dump({"colour": "red"}))
    assert run(["pair", "classify", "--config", str(path), "--out", str(tmp_path)]) == 2


def test_pair_embed(tmp_path):
    assert run(["pair", "embed", "--example", "1", "--horizon", "16", "--out", str(tmp_path)]) == 0


def test_transfer_on_the_shift(tmp_path):
    assert run(["transfer", "--example", "shift", "--horizon", "8", "--out", str(tmp_path)]) == 0
    _, report = read_json(str(tmp_path / "transfer-shift.json"))
    assert len(report["checks"]) == 28


def test_example_exhaustive(tmp_path):
    assert run(["example", "exhaustive", "--window", "1", "--horizon", "3", "--out", str(tmp_path)]) == 0


def test_metrics_and_prox(tmp_path):
    assert run(["metrics", "check", "--trials", "5", "--oracle_trials", "5", "--out", str(tmp_path)]) == 0
    assert run(["prox", "lift", "--trials", "5", "--out", str(tmp_path)]) == 0
    assert run(["prox", "sample", "--pairs", "3", "--horizon", "8", "--out", str(tmp_path)]) == 0


def test_unknown_command():
    assert run(["bogus"]) == 2
