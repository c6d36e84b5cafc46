import csv
import json

import numpy as np
import pytest

from pwltree.datagen import gen_henon, generate
from pwltree.fixed_tree import FixedTreeRegressor
from pwltree.harness import (
    ConfigError,
    ExperimentConfig,
    RunMetrics,
    TrialDiverged,
    average_metrics,
    build_stream,
    default_seed,
    load_csv_dataset,
    make_learner,
    run_experiment,
    run_stream,
    verify_equivalence,
    write_metrics_csv,
    write_summary_json,
)


class ProbeLearner:
    """Records the order of predict/update calls to audit causality."""

    def __init__(self):
        self.events = []
        self.seen_targets = []

    def predict(self, x_ext):
        self.events.append(("predict", len(self.seen_targets)))

        class P:
            y_hat = 0.0

        return P()

    def update(self, x_ext, d_t, pred):
        self.events.append(("update", len(self.seen_targets)))
        self.seen_targets.append(d_t)


class TestRunStream:
    def test_prediction_always_recorded_before_target_revealed(self):
        probe = ProbeLearner()
        stream = generate("matched", 25, seed=1)
        run_stream(probe, stream.extended, stream.targets)
        assert probe.events == [(kind, t) for t in range(25) for kind in ("predict", "update")]

    def test_metrics_shapes(self):
        stream = generate("matched", 50, seed=1)
        m = run_stream(FixedTreeRegressor(2, 2), stream.extended, stream.targets)
        assert len(m) == 50
        assert m.cum_e2.shape == (50,)
        assert np.all(np.diff(m.cum_e2) >= 0)
        assert (m.norm_err >= 0).all()
        assert m.counters["regressor_evaluations"] == 150

    def test_divergence_detected(self):
        stream = generate("matched", 3000, seed=1)
        wild = FixedTreeRegressor(2, 2, mu=50.0)
        with pytest.raises(TrialDiverged):
            run_stream(wild, stream.extended, stream.targets)


class TestAveraging:
    def test_identical_trials_average_to_single_run(self):
        # the quadratic-map stream ignores the seed, so trials coincide
        cfg = ExperimentConfig(
            stream={"kind": "henon", "n": 300},
            learners=[{"name": "dft", "kind": "dft", "depth": 1, "mu": 0.05}],
            trials=3, seed=0)
        result = run_experiment(cfg)
        single = run_stream(FixedTreeRegressor(1, 2, mu=0.05),
                            gen_henon(300).extended, gen_henon(300).targets)
        np.testing.assert_allclose(result.metrics["dft"].e2, single.e2)
        assert result.metrics["dft"].trials == 3

    def test_pointwise_mean(self):
        a = RunMetrics(np.array([1.0, 2.0]), counters={"k": 2})
        b = RunMetrics(np.array([3.0, 6.0]), counters={"k": 4})
        avg = average_metrics([a, b])
        np.testing.assert_allclose(avg.e2, [2.0, 4.0])
        assert avg.counters["k"] == 3.0


class TestConfig:
    def base(self):
        return {
            "schema": 1,
            "seed": 3,
            "trials": 2,
            "stream": {"kind": "matched", "n": 50},
            "learners": [{"name": "a", "kind": "lf", "mu": 0.05}],
        }

    def test_round_trip(self):
        cfg = ExperimentConfig.from_dict(self.base())
        assert cfg.trials == 2
        assert cfg.to_dict()["stream"]["kind"] == "matched"

    def test_bad_schema(self):
        raw = self.base()
        raw["schema"] = 99
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(raw)

    def test_duplicate_names(self):
        raw = self.base()
        raw["learners"] = [{"name": "a", "kind": "lf"}, {"name": "a", "kind": "vf"}]
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(raw)

    def test_missing_stream_kind(self):
        raw = self.base()
        raw["stream"] = {"n": 10}
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(raw)

    def test_unknown_key_rejected(self):
        raw = self.base()
        raw["bogus"] = 1
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(raw)

    def test_seed_env_default(self, monkeypatch):
        monkeypatch.setenv("PWLTREE_SEED", "777")
        raw = self.base()
        raw.pop("seed")
        assert ExperimentConfig.from_dict(raw).seed == 777
        assert default_seed() == 777

    def test_unknown_learner_kind(self):
        with pytest.raises(ConfigError):
            make_learner({"kind": "mystery"}, dim=2)

    def test_bad_learner_params(self):
        with pytest.raises(ConfigError):
            make_learner({"kind": "dft", "depth": 99}, dim=2)


class TestRunExperiment:
    def test_trial_seeds_offset_from_base(self):
        cfg = ExperimentConfig(
            stream={"kind": "matched", "n": 40},
            learners=[{"name": "lf", "kind": "lf", "mu": 0.05}],
            trials=2, seed=10)
        result = run_experiment(cfg)
        by_hand = []
        for trial in (0, 1):
            stream = generate("matched", 40, seed=10 + trial)
            from pwltree.baselines import LinearFilter
            by_hand.append(run_stream(LinearFilter(2, mu=0.05),
                                      stream.extended, stream.targets))
        np.testing.assert_allclose(result.metrics["lf"].e2, average_metrics(by_hand).e2)

    def test_divergent_learner_reported_not_fatal(self):
        cfg = ExperimentConfig(
            stream={"kind": "matched", "n": 3000},
            learners=[{"name": "ok", "kind": "lf", "mu": 0.01},
                      {"name": "wild", "kind": "dft", "depth": 2, "mu": 50.0}],
            trials=1, seed=0)
        result = run_experiment(cfg)
        assert "ok" in result.metrics
        assert "wild" not in result.metrics
        assert any("wild" in f for f in result.failures)


class TestOutputs:
    def make_result(self, tmp_path, stride=1):
        cfg = ExperimentConfig(
            stream={"kind": "matched", "n": 20},
            learners=[{"name": "lf", "kind": "lf", "mu": 0.05}],
            trials=1, seed=4, stride=stride)
        return run_experiment(cfg)

    def test_metrics_csv_columns_and_stride(self, tmp_path):
        result = self.make_result(tmp_path, stride=6)
        path = tmp_path / "m.csv"
        write_metrics_csv(result, path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "learner", "e2", "cum_e2", "norm_err"]
        ts = [int(r[0]) for r in rows[1:]]
        assert ts == [6, 12, 18, 20]  # stride points plus the final step

    def test_summary_json(self, tmp_path):
        result = self.make_result(tmp_path)
        path = tmp_path / "s.json"
        write_summary_json(result, path)
        summary = json.loads(path.read_text())
        assert summary["config"]["stream"]["kind"] == "matched"
        assert "lf" in summary["results"]
        assert summary["results"]["lf"]["n"] == 20


class TestCsvDataset:
    def write_csv(self, tmp_path, rows, header="a,b,y"):
        path = tmp_path / "data.csv"
        path.write_text(header + "\n" + "\n".join(rows) + "\n")
        return path

    def test_normalization_endpoints_and_midpoint(self, tmp_path):
        path = self.write_csv(tmp_path, ["0,4,-2", "10,5,0", "5,6,2"])
        ds = load_csv_dataset(path, "y")
        col = ds.stream.inputs[:, 0]
        np.testing.assert_allclose(col, [-1.0, 1.0, 0.0])
        np.testing.assert_allclose(ds.stream.targets, [-1.0, 0.0, 1.0])

    def test_constant_column_warns_and_zeroes(self, tmp_path):
        path = self.write_csv(tmp_path, ["0,5,-2", "10,5,0"])
        with pytest.warns(UserWarning):
            ds = load_csv_dataset(path, "y")
        assert (ds.stream.inputs[:, 1] == 0.0).all()

    def test_round_trip_denormalization(self, tmp_path):
        rng = np.random.default_rng(0)
        data = rng.normal(size=(50, 3)) * [2.0, 7.0, 0.5] + [1.0, -3.0, 4.0]
        rows = [",".join(repr(float(v)) for v in row) for row in data]
        path = self.write_csv(tmp_path, rows)
        ds = load_csv_dataset(path, 2)
        back = ds.denormalize_target(ds.stream.targets)
        np.testing.assert_allclose(back, data[:, 2], atol=1e-12)

    def test_error_scale_is_half_range(self, tmp_path):
        path = self.write_csv(tmp_path, ["0,1,-2", "1,2,6"])
        ds = load_csv_dataset(path, "y")
        assert ds.error_scale() == pytest.approx(4.0)

    def test_target_by_index_and_name_agree(self, tmp_path):
        path = self.write_csv(tmp_path, ["0,1,2", "3,4,5", "6,7,8"])
        by_name = load_csv_dataset(path, "b")
        by_index = load_csv_dataset(path, 1)
        np.testing.assert_array_equal(by_name.stream.targets, by_index.stream.targets)

    def test_non_numeric_cell(self, tmp_path):
        path = self.write_csv(tmp_path, ["0,oops,1", "2,3,4"])
        with pytest.raises(ValueError):
            load_csv_dataset(path, "y")

    def test_missing_target_column(self, tmp_path):
        path = self.write_csv(tmp_path, ["0,1,2"])
        with pytest.raises(ValueError):
            load_csv_dataset(path, "zzz")

    def test_build_stream_from_csv_spec(self, tmp_path):
        path = self.write_csv(tmp_path, ["0,1,2", "3,4,5", "1,2,3"])
        stream = build_stream({"kind": "csv", "path": str(path), "target": "y"}, seed=0)
        assert stream.dim == 2
        assert len(stream) == 3


class TestVerify:
    def test_inverse_time_schedule(self):
        from pwltree.harness import inverse_time_schedule
        mu = inverse_time_schedule(0.5)
        assert mu(1) == 4.0
        assert mu(4) == 1.0

    def test_dft_within_tolerance(self):
        assert verify_equivalence("dft", 2, 200, seed=5) <= 1e-9

    def test_dat_within_tolerance(self):
        assert verify_equivalence("dat", 1, 200, seed=5) <= 1e-9

    def test_unknown_mode(self):
        with pytest.raises(ConfigError):
            verify_equivalence("nope", 2, 10, seed=1)
