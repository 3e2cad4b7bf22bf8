"""End-to-end subcommand tests against temp directories."""
import csv
import json

import numpy as np
import pytest

from dcs import (
    generate as synth_generate,
    load_dataset,
    load_scheme,
    predict,
    save_dataset,
)
from dcs.cli import main, mode_indices
from dcs.corrections import default_function_set
from dcs.synth import BiasProfile, save_profile

FAST = [
    "--init-temp", "100.0",
    "--alpha", "0.6",
    "--min-temp", "0.01",
]
# 100 * 0.6^t < 0.01 at t = 19: quick but still a real multi-loop run


@pytest.fixture()
def train_csv(tmp_path):
    profile = BiasProfile(
        num_classes=3,
        class_priors=(1 / 3, 1 / 3, 1 / 3),
        target_accuracy=(0.9, 0.25, 0.85),
        confusion_temperature=1.0,
        seed=3,
    )
    path = tmp_path / "train.csv"
    save_dataset(synth_generate(profile, 300), path)
    return path


class TestOptimize:
    def test_writes_complete_layout(self, tmp_path, train_csv):
        out = tmp_path / "run"
        rc = main(
            ["optimize", "--input", str(train_csv), "--seed", "0",
             "--out", str(out), *FAST]
        )
        assert rc == 0
        for name in (
            "scheme.json",
            "solve.json",
            "trace.csv",
            "optimization_set.json",
            "dev_set.json",
            "dev_report.json",
            "dev_baseline.json",
            "dev_report.csv",
        ):
            assert (out / name).exists(), name

    def test_solve_json_fields(self, tmp_path, train_csv):
        out = tmp_path / "run"
        main(["optimize", "--input", str(train_csv), "--seed", "1",
              "--out", str(out), *FAST])
        payload = json.loads((out / "solve.json").read_text())
        assert payload["task"] == "train"
        assert payload["num_classes"] == 3
        assert payload["search_space"] == 3 * 49
        assert payload["outer_loops_run"] == len(payload["temperatures"])
        assert payload["wall_time"] > 0

    def test_trace_csv_matches_solve(self, tmp_path, train_csv):
        out = tmp_path / "run"
        main(["optimize", "--input", str(train_csv), "--seed", "1",
              "--out", str(out), *FAST])
        payload = json.loads((out / "solve.json").read_text())
        with (out / "trace.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == payload["outer_loops_run"]
        assert float(rows[0]["temperature"]) == payload["temperatures"][0]
        assert float(rows[-1]["best_z"]) == payload["z_trace"][-1]

    def test_scheme_loads_and_matches_optimization_set(self, tmp_path, train_csv):
        out = tmp_path / "run"
        main(["optimize", "--input", str(train_csv), "--seed", "2",
              "--out", str(out), *FAST])
        scheme = load_scheme(out / "scheme.json")
        opt = load_dataset(out / "optimization_set.json")
        assert scheme.matches_dataset(opt)
        payload = json.loads((out / "solve.json").read_text())
        assert scheme.best_z == payload["best_z"]

    def test_split_sizes_default_fraction(self, tmp_path, train_csv):
        out = tmp_path / "run"
        main(["optimize", "--input", str(train_csv), "--seed", "0",
              "--out", str(out), *FAST])
        opt = load_dataset(out / "optimization_set.json")
        dev = load_dataset(out / "dev_set.json")
        assert opt.num_instances == 285
        assert dev.num_instances == 15

    def test_dnip_mode_selects_only_weights_or_k0(self, tmp_path, train_csv):
        out = tmp_path / "run"
        main(["optimize", "--input", str(train_csv), "--mode", "dnip",
              "--seed", "0", "--out", str(out), *FAST])
        scheme = load_scheme(out / "scheme.json")
        fs = scheme.catalog
        for k in scheme.selection:
            assert k == fs.dont_change_index or fs.index_kind(k) == "weight"

    def test_furud_mode_selects_only_memberships(self, tmp_path, train_csv):
        out = tmp_path / "run"
        main(["optimize", "--input", str(train_csv), "--mode", "furud",
              "--seed", "0", "--out", str(out), *FAST])
        scheme = load_scheme(out / "scheme.json")
        for k in scheme.selection:
            assert scheme.catalog.index_kind(k) == "membership"

    def test_err_objective_forces_zero_weights(self, tmp_path, train_csv):
        out = tmp_path / "run"
        main(["optimize", "--input", str(train_csv), "--objective", "err",
              "--beta", "7", "--tau", "7", "--seed", "0",
              "--out", str(out), *FAST])
        scheme = load_scheme(out / "scheme.json")
        assert scheme.objective.beta == 0.0
        assert scheme.objective.tau == 0.0

    def test_missing_seed_is_a_usage_error(self, tmp_path, train_csv):
        with pytest.raises(SystemExit) as exc:
            main(["optimize", "--input", str(train_csv),
                  "--out", str(tmp_path / "x")])
        assert exc.value.code == 2

    def test_missing_input_file_exit_4(self, tmp_path):
        rc = main(["optimize", "--input", str(tmp_path / "absent.csv"),
                   "--seed", "0", "--out", str(tmp_path / "x")])
        assert rc == 4

    def test_invalid_dataset_exit_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("id,label,p_1,p_2\na,9,0.5,0.5\nb,1,0.5,0.5\n")
        rc = main(["optimize", "--input", str(bad), "--seed", "0",
                   "--out", str(tmp_path / "x")])
        assert rc == 2

    def test_bad_schedule_exit_3(self, tmp_path, train_csv):
        rc = main(["optimize", "--input", str(train_csv), "--seed", "0",
                   "--alpha", "1.5", "--out", str(tmp_path / "x")])
        assert rc == 3


class TestApply:
    @pytest.fixture()
    def run_dir(self, tmp_path, train_csv):
        out = tmp_path / "run"
        main(["optimize", "--input", str(train_csv), "--seed", "0",
              "--out", str(out), *FAST])
        return out

    def test_apply_to_own_optimization_set(self, tmp_path, run_dir):
        out = tmp_path / "applied"
        rc = main(["apply", "--scheme", str(run_dir / "scheme.json"),
                   "--input", str(run_dir / "optimization_set.json"),
                   "--out", str(out)])
        assert rc == 0
        payload = json.loads((out / "report.json").read_text())
        assert payload["optimization_set_match"] is True
        assert payload["recomputed_z"] == payload["recorded_best_z"]

    def test_predictions_match_library(self, tmp_path, run_dir, train_csv):
        out = tmp_path / "applied"
        main(["apply", "--scheme", str(run_dir / "scheme.json"),
              "--input", str(train_csv), "--out", str(out)])
        scheme = load_scheme(run_dir / "scheme.json")
        ds = load_dataset(train_csv)
        expected = predict(ds, scheme.catalog, scheme.selection)
        with (out / "predictions.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        got = np.array([int(r["prediction"]) for r in rows])
        assert np.array_equal(got, expected)
        assert [r["id"] for r in rows] == list(ds.instance_ids)

    def test_report_csv_per_class_table(self, tmp_path, run_dir, train_csv):
        out = tmp_path / "applied"
        main(["apply", "--scheme", str(run_dir / "scheme.json"),
              "--input", str(train_csv), "--out", str(out)])
        with (out / "report.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert [r["class"] for r in rows] == ["1", "2", "3"]
        assert set(rows[0]) == {
            "class", "n_true", "accuracy", "correction_kind",
            "correction_params",
        }

    def test_class_count_mismatch_exit_2(self, tmp_path, run_dir):
        two_class = tmp_path / "two.csv"
        two_class.write_text(
            "id,label,p_1,p_2\na,1,0.9,0.1\nb,2,0.2,0.8\n"
        )
        rc = main(["apply", "--scheme", str(run_dir / "scheme.json"),
                   "--input", str(two_class), "--out", str(tmp_path / "x")])
        assert rc == 2


class TestCompare:
    def test_grid_shape_and_sorting(self, tmp_path, train_csv):
        out = tmp_path / "cmp"
        rc = main(["compare", "--input", str(train_csv),
                   "--seed", "0,1", "--out", str(out), *FAST])
        assert rc == 0
        with (out / "runs.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 6  # 1 dataset x 3 modes x 2 seeds
        keys = [(r["dataset"], r["mode"], int(r["seed"])) for r in rows]
        assert keys == sorted(keys)

    def test_summary_math(self, tmp_path, train_csv):
        out = tmp_path / "cmp"
        main(["compare", "--input", str(train_csv), "--mode", "dcs",
              "--seed", "0,1,2", "--out", str(out), *FAST])
        with (out / "runs.csv").open() as fh:
            runs = list(csv.DictReader(fh))
        with (out / "summary.csv").open() as fh:
            summary = list(csv.DictReader(fh))
        assert len(summary) == 1
        accs = [float(r["eval_accuracy"]) for r in runs]
        assert float(summary[0]["accuracy_mean"]) == pytest.approx(
            sum(accs) / 3, abs=1e-12
        )
        assert int(summary[0]["num_seeds"]) == 3
        tally = summary[0]["kind_tally"]
        assert tally.startswith("membership:weight:dont_change=")

    def test_eval_input_pairing(self, tmp_path, train_csv):
        eval_path = tmp_path / "eval.csv"
        profile = BiasProfile(
            num_classes=3,
            class_priors=(1 / 3, 1 / 3, 1 / 3),
            target_accuracy=(0.9, 0.25, 0.85),
            confusion_temperature=1.0,
            seed=3,
        )
        save_dataset(synth_generate(profile, 200, replica=1), eval_path)
        out = tmp_path / "cmp"
        rc = main(["compare", "--input", str(train_csv),
                   "--eval-input", str(eval_path), "--mode", "dcs",
                   "--seed", "0", "--out", str(out), *FAST])
        assert rc == 0
        with (out / "runs.csv").open() as fh:
            row = next(csv.DictReader(fh))
        # eval metrics computed on the held-out file, not the train set
        assert row["dataset"] == "train"
        assert float(row["eval_accuracy"]) != float(row["train_accuracy"])

    def test_mismatched_pairing_exit_2(self, tmp_path, train_csv):
        rc = main(["compare", "--input", str(train_csv),
                   "--eval-input", "a.csv", "--eval-input", "b.csv",
                   "--seed", "0", "--out", str(tmp_path / "x")])
        assert rc == 2

    def test_thread_invariance_except_wall_time(
        self, tmp_path, train_csv, monkeypatch
    ):
        out1 = tmp_path / "cmp1"
        main(["compare", "--input", str(train_csv), "--mode", "dcs,dnip",
              "--seed", "0", "--out", str(out1), *FAST])
        monkeypatch.setenv("DCS_THREADS", "2")
        out2 = tmp_path / "cmp2"
        main(["compare", "--input", str(train_csv), "--mode", "dcs,dnip",
              "--seed", "0", "--out", str(out2), *FAST])

        def strip_wall(path):
            with path.open() as fh:
                rows = list(csv.reader(fh))
            drop = rows[0].index("wall_time")
            return [
                [cell for i, cell in enumerate(row) if i != drop]
                for row in rows
            ]

        assert strip_wall(out1 / "runs.csv") == strip_wall(out2 / "runs.csv")

    def test_invalid_thread_env_exit_2(self, tmp_path, train_csv, monkeypatch):
        monkeypatch.setenv("DCS_THREADS", "zero")
        rc = main(["compare", "--input", str(train_csv), "--seed", "0",
                   "--out", str(tmp_path / "x"), *FAST])
        assert rc == 2


class TestReport:
    def test_report_to_file(self, tmp_path, train_csv):
        run = tmp_path / "run"
        main(["optimize", "--input", str(train_csv), "--seed", "0",
              "--out", str(run), *FAST])
        out_csv = tmp_path / "times.csv"
        rc = main(["report", str(run / "solve.json"), "--out", str(out_csv)])
        assert rc == 0
        with out_csv.open() as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1
        assert rows[0]["task"] == "train"
        assert int(rows[0]["search_space"]) == 147
        assert float(rows[0]["wall_time"]) > 0
        assert int(rows[0]["outer_loops"]) <= 150

    def test_malformed_solve_exit_2(self, tmp_path):
        bad = tmp_path / "solve.json"
        bad.write_text("{}")
        rc = main(["report", str(bad)])
        assert rc == 2


class TestOracleCommand:
    def test_writes_result(self, tmp_path, tiny_catalog):
        from dcs import save_catalog

        profile = BiasProfile(
            num_classes=2,
            class_priors=(0.5, 0.5),
            target_accuracy=(0.9, 0.3),
            confusion_temperature=1.0,
            seed=5,
        )
        data = tmp_path / "small.csv"
        save_dataset(synth_generate(profile, 50), data)
        cat = tmp_path / "cat.json"
        save_catalog(tiny_catalog, cat)
        out = tmp_path / "orc"
        rc = main(["oracle", "--input", str(data), "--catalog", str(cat),
                   "--out", str(out)])
        assert rc == 0
        payload = json.loads((out / "oracle.json").read_text())
        assert payload["num_evaluated"] == 16
        assert len(payload["best_xi"]) == 2

    def test_limit_guard_exit_3(self, tmp_path, train_csv):
        rc = main(["oracle", "--input", str(train_csv), "--limit", "100",
                   "--out", str(tmp_path / "x")])
        assert rc == 3


class TestGenerate:
    def test_suite_layout(self, tmp_path):
        out = tmp_path / "suite"
        rc = main(["generate", "--out", str(out)])
        assert rc == 0
        manifest = json.loads((out / "suite.json").read_text())
        assert len(manifest["tasks"]) == 5
        for task in manifest["tasks"]:
            train = load_dataset(out / task["train"])
            assert train.num_classes == task["num_classes"]
            assert (out / task["profile"]).exists()

    def test_single_profile_mode(self, tmp_path):
        profile = BiasProfile(
            num_classes=2,
            class_priors=(0.5, 0.5),
            target_accuracy=(0.8, 0.4),
            confusion_temperature=1.0,
            seed=13,
        )
        ppath = tmp_path / "my_profile.json"
        save_profile(profile, ppath)
        out = tmp_path / "single"
        rc = main(["generate", "--out", str(out), "--profile", str(ppath),
                   "--name", "tiny", "--train-size", "40",
                   "--eval-size", "30"])
        assert rc == 0
        train = load_dataset(out / "tiny_train.csv")
        eval_ds = load_dataset(out / "tiny_eval.csv")
        assert train.num_instances == 40
        assert eval_ds.num_instances == 30


class TestModeIndices:
    def test_partition_of_catalog(self):
        fs = default_function_set()
        assert mode_indices(fs, "dcs") == tuple(range(1, 50))
        dnip = mode_indices(fs, "dnip")
        assert dnip[0] == fs.dont_change_index
        assert all(fs.index_kind(k) == "weight" for k in dnip[1:])
        furud = mode_indices(fs, "furud")
        assert furud == tuple(range(1, 20))
