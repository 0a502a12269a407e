"""Command-line behavior: subcommands, exit codes, stdout determinism."""

import json

import pytest

from peergrade import build_scenario, datasets_equal, load_dataset
from peergrade.cli import dispatch
from peergrade.io import load_scenario_config


@pytest.fixture()
def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({
        "schema_version": 1, "preset": "default", "n": 40, "m": 40, "seed": 5,
    }))
    return path


@pytest.fixture()
def split_file(tmp_path):
    path = tmp_path / "split.json"
    path.write_text(json.dumps({
        "schema_version": 1, "train_fraction": 0.2, "n_splits": 2, "seed": 0,
    }))
    return path


@pytest.fixture()
def train_file(tmp_path):
    path = tmp_path / "train.json"
    path.write_text(json.dumps({
        "schema_version": 1, "epochs": 40, "dim": 8, "seed": 0,
    }))
    return path


@pytest.fixture()
def bundle_dir(tmp_path, scenario_file):
    out = tmp_path / "bundle"
    assert dispatch(["generate", "--config", str(scenario_file), "--out", str(out)]) == 0
    return out


class TestGenerate:
    def test_matches_library_build(self, bundle_dir, scenario_file):
        cfg = load_scenario_config(scenario_file)
        expected = build_scenario(cfg)
        assert datasets_equal(expected, load_dataset(bundle_dir))

    def test_seed_override(self, tmp_path, scenario_file, capsys):
        out = tmp_path / "b2"
        assert dispatch(["generate", "--config", str(scenario_file),
                         "--out", str(out), "--seed", "9"]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["seed"] == 9

    def test_stdout_summary_counts(self, tmp_path, scenario_file, capsys):
        out = tmp_path / "b3"
        dispatch(["generate", "--config", str(scenario_file), "--out", str(out)])
        summary = json.loads(capsys.readouterr().out)
        assert summary["assessments"] == 40 * 3
        assert summary["ownership"] == 40

    def test_missing_config_is_validation_error(self, tmp_path, capsys):
        code = dispatch(["generate", "--config", str(tmp_path / "nope.json"),
                         "--out", str(tmp_path / "x")])
        assert code == 3


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        assert dispatch(["frobnicate"]) == 2
        assert "usage" in capsys.readouterr().err

    def test_missing_required_flag(self, capsys):
        assert dispatch(["generate"]) == 2

    def test_no_arguments(self, capsys):
        assert dispatch([]) == 2

    def test_help_exits_zero(self, capsys):
        assert dispatch(["--help"]) == 0


class TestBaselineCommand:
    def test_report_json(self, bundle_dir, split_file, capsys):
        code = dispatch(["baseline", "--method", "average",
                         "--data", str(bundle_dir), "--split", str(split_file)])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["methods"] == ["average"]
        assert len(doc["per_split"]["average"]) == 2
        assert "wall_clock_seconds" not in doc

    def test_stdout_byte_identical_across_runs(self, bundle_dir, split_file, capsys):
        args = ["baseline", "--method", "median",
                "--data", str(bundle_dir), "--split", str(split_file)]
        assert dispatch(args) == 0
        first = capsys.readouterr().out
        assert dispatch(args) == 0
        second = capsys.readouterr().out
        assert first == second


class TestTrainEval:
    def test_train_then_eval(self, tmp_path, bundle_dir, split_file, train_file, capsys):
        model = tmp_path / "model.json"
        assert dispatch(["train", "--data", str(bundle_dir),
                         "--train-config", str(train_file), "--out", str(model)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["epochs"] == 40
        assert model.exists()

        assert dispatch(["eval", "--data", str(bundle_dir), "--model", str(model),
                         "--split", str(split_file)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["method"] == "gcn-soan"
        assert len(doc["per_split"]) == 2
        assert 0.0 <= doc["mean"] <= 1.0

    def test_train_seed_override_changes_model(self, tmp_path, bundle_dir, train_file, capsys):
        m1, m2 = tmp_path / "m1.json", tmp_path / "m2.json"
        dispatch(["train", "--data", str(bundle_dir), "--train-config", str(train_file),
                  "--out", str(m1), "--seed", "1"])
        dispatch(["train", "--data", str(bundle_dir), "--train-config", str(train_file),
                  "--out", str(m2), "--seed", "2"])
        capsys.readouterr()
        assert m1.read_text() != m2.read_text()


class TestSweepCommand:
    def test_csv_shape_and_file(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "schema_version": 1,
            "param": "k",
            "grid": [1, 2, 3],
            "base": {"preset": "default", "n": 30, "m": 30, "seed": 0},
            "methods": ["average", "median"],
            "split": {"train_fraction": 0.2, "n_splits": 2, "seed": 0},
        }))
        out = tmp_path / "sweep.csv"
        assert dispatch(["sweep", "--spec", str(spec), "--out", str(out)]) == 0
        stdout = capsys.readouterr().out
        assert out.read_text() == stdout
        lines = stdout.strip().splitlines()
        assert lines[0] == "param,value,method,split,rmse"
        mean_rows = [l for l in lines if ",mean," in l]
        assert len(mean_rows) == 3 * 2  # |grid| x |methods|

    def test_jobs_flag_does_not_change_output(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "schema_version": 1,
            "param": "k",
            "grid": [1, 2],
            "base": {"preset": "default", "n": 25, "m": 25, "seed": 0},
            "methods": ["average"],
            "split": {"train_fraction": 0.2, "n_splits": 1, "seed": 0},
        }))
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        assert dispatch(["sweep", "--spec", str(spec), "--out", str(out1), "--jobs", "1"]) == 0
        assert dispatch(["sweep", "--spec", str(spec), "--out", str(out2), "--jobs", "2"]) == 0
        capsys.readouterr()
        assert out1.read_text() == out2.read_text()

    def test_jobs_env_var_fallback(self, tmp_path, capsys, monkeypatch):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "schema_version": 1,
            "param": "k",
            "grid": [1, 2],
            "base": {"preset": "default", "n": 25, "m": 25, "seed": 0},
            "methods": ["median"],
            "split": {"train_fraction": 0.2, "n_splits": 1, "seed": 0},
        }))
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        assert dispatch(["sweep", "--spec", str(spec), "--out", str(out1)]) == 0
        monkeypatch.setenv("PEERGRADE_JOBS", "2")
        assert dispatch(["sweep", "--spec", str(spec), "--out", str(out2)]) == 0
        capsys.readouterr()
        assert out1.read_text() == out2.read_text()


class TestImportCommand:
    def test_import_with_scaling(self, tmp_path, capsys):
        src = tmp_path / "raw"
        src.mkdir()
        (src / "assessments.csv").write_text("grader_id,item_id,grade\nu1,i1,8\nu2,i1,6\n")
        (src / "truth.csv").write_text("item_id,value\ni1,7\n")
        out = tmp_path / "imported"
        code = dispatch(["import", "--from", str(src), "--scale", "max=10",
                         "--out", str(out)])
        assert code == 0
        ds = load_dataset(out)
        assert ds.graph.A[0, 0] == pytest.approx(0.8)
        assert ds.truth.v[0] == pytest.approx(0.7)

    def test_bad_scale_flag_is_validation_error(self, tmp_path, capsys):
        src = tmp_path / "raw"
        src.mkdir()
        (src / "assessments.csv").write_text("grader_id,item_id,grade\nu1,i1,0.8\n")
        (src / "truth.csv").write_text("item_id,value\ni1,0.7\n")
        assert dispatch(["import", "--from", str(src), "--scale", "10",
                         "--out", str(tmp_path / "x")]) == 3

    def test_input_files_not_mutated(self, tmp_path, capsys):
        src = tmp_path / "raw"
        src.mkdir()
        (src / "assessments.csv").write_text("grader_id,item_id,grade\nu1,i1,0.8\n")
        (src / "truth.csv").write_text("item_id,value\ni1,0.7\n")
        before = {p.name: p.read_bytes() for p in src.iterdir()}
        dispatch(["import", "--from", str(src), "--out", str(tmp_path / "y")])
        after = {p.name: p.read_bytes() for p in src.iterdir()}
        assert before == after


class TestExitCodes:
    def test_validation_error_is_3(self, tmp_path, split_file, capsys):
        src = tmp_path / "raw"
        src.mkdir()
        (src / "assessments.csv").write_text("grader_id,item_id,grade\nu1,i1,5.0\n")
        (src / "truth.csv").write_text("item_id,value\ni1,0.7\n")
        assert dispatch(["baseline", "--method", "average", "--data", str(src),
                         "--split", str(split_file)]) == 3

    def test_unwritable_output_is_4(self, bundle_dir, train_file, capsys):
        code = dispatch(["train", "--data", str(bundle_dir),
                         "--train-config", str(train_file),
                         "--out", "/proc/definitely/not/writable.json"])
        assert code == 4
