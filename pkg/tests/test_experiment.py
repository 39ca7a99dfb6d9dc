import csv
import json

import numpy as np
import pytest

from marketsc.errors import ConfigError
from marketsc.experiment import ExperimentConfig, aggregate, run_experiment, split_indices

SMALL_TRAIN = {"epochs": 3, "learning_rate": 0.05, "batch_size": 100}
SCENARIO = {"kind": "two_feature", "m": 400, "seed": 1}


def _records(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(split=(0.5, 0.5, 0.1))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"comand": "train"})
    with pytest.raises(ConfigError):
        ExperimentConfig(train={"learning_rat": 0.1})
    with pytest.raises(ConfigError):
        ExperimentConfig(methods=("naive", "oracle"))
    with pytest.raises(ConfigError):
        ExperimentConfig(dataset="a.csv", scenario=SCENARIO)


def test_config_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json(p)
    p.write_text(json.dumps({"command": "price", "scenario": SCENARIO, "train": {"smooth": {"temp_softmax": 0.5}}}))
    cfg = ExperimentConfig.from_json(p)
    assert cfg.train_config().smooth.temp_softmax == 0.5


def test_split_indices():
    parts = split_indices(100, (0.7, 0.1, 0.2), np.random.default_rng(0))
    assert [len(p) for p in parts] == [70, 10, 20]
    assert sorted(np.concatenate(parts).tolist()) == list(range(100))


def test_aggregate_mean_and_stderr():
    recs = [{"record": "metrics", "alpha": None, "method": "masc", "horizon": "long", "split": i,
             "accuracy": a} for i, a in enumerate([0.5, 0.7, 0.9])]
    (row,) = aggregate(recs)
    assert row["n"] == 3 and row["mean"] == pytest.approx(0.7)
    assert row["stderr"] == pytest.approx(0.2 / np.sqrt(3))


def test_train_reports_and_determinism(tmp_path):
    cfg = ExperimentConfig(command="train", scenario=SCENARIO, train=SMALL_TRAIN, repetitions=2,
                           out_dir=str(tmp_path / "a"))
    paths = run_experiment(cfg)
    recs = _records(paths["results"])
    assert recs[0]["record"] == "config" and recs[0]["scenario"] == SCENARIO
    metric = [r for r in recs if r["record"] == "metrics"]
    # per split: naive benchmark plus short and long for each of the three methods
    assert len(metric) == 2 * 7
    with paths["aggregate"].open() as fh:
        rows = list(csv.DictReader(fh))
    assert {r["method"] for r in rows} == {"naive", "strat", "masc"}
    again = run_experiment(ExperimentConfig(**{**cfg.__dict__, "out_dir": str(tmp_path / "b")}))
    assert paths["results"].read_bytes() == again["results"].read_bytes()
    assert paths["aggregate"].read_bytes() == again["aggregate"].read_bytes()


def test_sweep_record_count(tmp_path):
    cfg = ExperimentConfig(command="sweep", scenario={**SCENARIO, "kind": "budget_label_independent"},
                           train=SMALL_TRAIN, repetitions=2, alphas=(2, 4, 6), methods=("naive", "masc"),
                           out_dir=str(tmp_path))
    recs = [r for r in _records(run_experiment(cfg)["results"]) if r["record"] == "metrics"]
    keys = {(r["alpha"], r["method"], r["horizon"], r["split"]) for r in recs}
    assert len(recs) == len(keys) == 3 * 2 * (1 + 2 * 2)


def test_sweep_needs_alphas(tmp_path):
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig(command="sweep", scenario=SCENARIO, out_dir=str(tmp_path)))


def test_price_and_synth_and_eval(tmp_path):
    prof = {"kind": "beta_demand", "m": 500, "beta_a": 2, "beta_b": 3}
    rec = _records(run_experiment(ExperimentConfig(command="price", scenario=prof, out_dir=str(tmp_path / "p")))["results"])[1]
    assert rec["profile_size"] == 500 and 0 < rec["setter_percentile"] <= 1 and rec["rho_smooth"] > 0

    out = tmp_path / "s"
    paths = run_experiment(ExperimentConfig(command="synth", scenario=SCENARIO, out_dir=str(out)))
    assert (out / "dataset.csv").exists() and _records(paths["results"])[1]["size"] == 400

    cfg = ExperimentConfig(command="eval", dataset=str(out / "dataset.csv"), strict=False,
                           classifier={"w": [1.0, 0.0], "tau": 0.0}, out_dir=str(tmp_path / "e"))
    recs = _records(run_experiment(cfg)["results"])
    assert [r["horizon"] for r in recs[1:]] == ["short", "long", "benchmark"]

    cfg = ExperimentConfig(command="simulate", dataset=str(out / "dataset.csv"), strict=False,
                           classifier={"w": [1.0, 0.0], "tau": 0.0}, out_dir=str(tmp_path / "m"))
    assert run_experiment(cfg)["post_market"].exists()
