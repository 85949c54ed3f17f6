"""End-to-end command-line workflow on a small synthetic survey."""

import json
import os

import numpy as np
import pytest

from sandfrac import cli


@pytest.fixture(scope="module")
def survey(tmp_path_factory):
    """Tiny generated survey plus a prepared modeling table."""
    root = tmp_path_factory.mktemp("survey")
    data = root / "data"
    rc = cli.main([
        "synth", "--out-dir", str(data), "--seed", "11", "--wells", "3",
        "--inlines", "12", "--crosslines", "12", "--nt", "16", "--noise", "0.02",
    ])
    assert rc == 0
    cubes = [str(data / f"{n}.sfcube") for n in ("impedance", "amplitude", "inst_freq")]
    merged = root / "merged.csv"
    rc = cli.main([
        "prep", "--wells", str(data / "wells.csv"),
        "--locations", str(data / "locations.csv"),
        "--cubes", *cubes, "--out", str(merged),
    ])
    assert rc == 0
    return {
        "root": root,
        "wells": str(data / "wells.csv"),
        "locations": str(data / "locations.csv"),
        "cubes": cubes,
        "merged": str(merged),
    }


def train_model(survey, out, *extra):
    return cli.main([
        "train", "--data", survey["merged"], "--out", str(out),
        "--seed", "0", "--no-figures",
        "--attributes", "impedance,amplitude,inst_freq", *extra,
    ])


class TestPrep:
    def test_merged_columns_and_row_count(self, survey):
        lines = open(survey["merged"]).read().strip().splitlines()
        head = lines[0].split(",")
        assert head == ["well_id", "time_ms", "impedance", "amplitude",
                        "inst_freq", "noise_attr", "sand_fraction"]
        # three wells sampled on the fine grid: 4 * (16 - 1) + 1 rows each
        assert len(lines) == 1 + 3 * 61

    def test_missing_wells_file_exits_2(self, survey, tmp_path):
        rc = cli.main([
            "prep", "--wells", str(tmp_path / "nope.csv"),
            "--locations", survey["locations"],
            "--cubes", *survey["cubes"], "--out", str(tmp_path / "m.csv"),
        ])
        assert rc == 2


class TestTrain:
    def test_grid_model_file_report_and_stdout(self, survey, tmp_path, capsys):
        out = tmp_path / "grid.json"
        rc = train_model(survey, out, "--model", "grid", "--p", "2", "--epochs", "3")
        assert rc == 0
        doc = json.load(open(out))
        assert doc["version"] == "tsk-1"
        assert len(doc["rules"]) == 2 ** 3
        report = open(tmp_path / "grid_report.csv").read().strip().splitlines()
        assert report[0] == "epoch,train_rmse,test_rmse"
        assert len(report) == 1 + 3
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "set,n_samples,cc,rmse,aem,si"
        assert lines[1].startswith("train,") and lines[2].startswith("test,")

    def test_grid_p3_three_inputs_gives_27_rules(self, survey, tmp_path):
        out = tmp_path / "g3.json"
        rc = train_model(survey, out, "--model", "grid", "--p", "3", "--epochs", "1")
        assert rc == 0
        doc = json.load(open(out))
        assert len(doc["rules"]) == 27
        assert all(len(bank) == 3 for bank in doc["mf_banks"])

    def test_ann_model_file(self, survey, tmp_path):
        out = tmp_path / "ann.json"
        rc = train_model(survey, out, "--model", "ann", "--hidden", "4", "--epochs", "5")
        assert rc == 0
        assert json.load(open(out))["version"] == "mlp-1"

    def test_save_splits_written(self, survey, tmp_path):
        out = tmp_path / "m.json"
        splits = tmp_path / "splits"
        rc = train_model(survey, out, "--model", "fcm", "--clusters", "3",
                         "--epochs", "2", "--save-splits", str(splits))
        assert rc == 0
        train_rows = open(splits / "train.csv").read().strip().splitlines()
        test_rows = open(splits / "test.csv").read().strip().splitlines()
        n = 3 * 61
        assert len(train_rows) - 1 == int(0.7 * n)
        assert (len(train_rows) - 1) + (len(test_rows) - 1) == n

    def test_unknown_model_exits_3(self, survey, tmp_path):
        rc = train_model(survey, tmp_path / "x.json", "--model", "boosted")
        assert rc == 3

    def test_unknown_attribute_exits_2(self, survey, tmp_path):
        rc = cli.main([
            "train", "--data", survey["merged"], "--out", str(tmp_path / "x.json"),
            "--model", "grid", "--no-figures",
            "--attributes", "impedance,zz", "--epochs", "1",
        ])
        assert rc == 2

    def test_figures_rendered_unless_disabled(self, survey, tmp_path):
        out = tmp_path / "fig.json"
        rc = cli.main([
            "train", "--data", survey["merged"], "--out", str(out),
            "--seed", "0", "--attributes", "impedance,amplitude,inst_freq",
            "--model", "subtractive", "--radius", "0.6", "--epochs", "2",
        ])
        assert rc == 0
        assert (tmp_path / "fig_report.png").exists()
        out2 = tmp_path / "nofig.json"
        rc = train_model(survey, out2, "--model", "subtractive",
                         "--radius", "0.6", "--epochs", "2")
        assert rc == 0
        assert not (tmp_path / "nofig_report.png").exists()


@pytest.fixture(scope="module")
def fcm_model(survey):
    out = survey["root"] / "eval_model.json"
    rc = train_model(survey, out, "--model", "fcm", "--clusters", "4", "--epochs", "3")
    assert rc == 0
    return str(out)


@pytest.fixture(scope="module")
def sub_model(survey):
    out = survey["root"] / "vol_model.json"
    rc = train_model(survey, out, "--model", "subtractive", "--radius", "0.6", "--epochs", "3")
    assert rc == 0
    return str(out)


class TestEvaluate:
    def test_overall_row(self, survey, fcm_model, tmp_path, capsys):
        out = tmp_path / "metrics.csv"
        rc = cli.main(["evaluate", "--data", survey["merged"], "--model", fcm_model,
                       "--out", str(out), "--no-figures"])
        assert rc == 0
        lines = open(out).read().strip().splitlines()
        assert lines[0] == "scope,n_samples,cc,rmse,aem,si"
        assert len(lines) == 2
        row = lines[1].split(",")
        assert row[0] == "overall" and int(row[1]) == 3 * 61
        printed = capsys.readouterr().out.strip().splitlines()
        assert printed == lines

    def test_per_well_rows_in_first_appearance_order(self, survey, fcm_model, tmp_path):
        out = tmp_path / "metrics.csv"
        rc = cli.main(["evaluate", "--data", survey["merged"], "--model", fcm_model,
                       "--out", str(out), "--per-well", "--no-figures"])
        assert rc == 0
        scopes = [l.split(",")[0] for l in open(out).read().strip().splitlines()[1:]]
        assert scopes == ["overall", "A", "B", "C"]

    def test_missing_model_file_exits_2(self, survey, tmp_path):
        rc = cli.main(["evaluate", "--data", survey["merged"],
                       "--model", str(tmp_path / "no.json"),
                       "--out", str(tmp_path / "m.csv"), "--no-figures"])
        assert rc == 2

    def test_unrecognized_model_version_exits_2(self, survey, tmp_path):
        bogus = tmp_path / "bogus.json"
        bogus.write_text(json.dumps({"version": "nope-1"}))
        rc = cli.main(["evaluate", "--data", survey["merged"], "--model", str(bogus),
                       "--out", str(tmp_path / "m.csv"), "--no-figures"])
        assert rc == 2


class TestVolume:
    def test_prediction_cube_written(self, survey, sub_model, tmp_path):
        out = tmp_path / "pred.sfcube"
        rc = cli.main(["volume", "--model", sub_model, "--cubes", *survey["cubes"],
                       "--out", str(out), "--no-figures"])
        assert rc == 0
        from sandfrac.volume import read_cube_attribute

        geo, name, grid = read_cube_attribute(out)
        assert name == "sand_fraction"
        assert geo.shape == (12, 12, 16)
        finite = grid[np.isfinite(grid)]
        assert finite.size > 0
        assert finite.min() >= 0.0 and finite.max() <= 1.0

    def test_smooth_slice_and_overlay_outputs(self, survey, sub_model, tmp_path):
        out = tmp_path / "pred.sfcube"
        rc = cli.main([
            "volume", "--model", sub_model, "--cubes", *survey["cubes"],
            "--out", str(out), "--smooth", "--slice", "5",
            "--overlay-well", "B", "--wells", survey["wells"],
            "--locations", survey["locations"], "--no-figures",
        ])
        assert rc == 0
        grid = np.loadtxt(tmp_path / "pred_inline5.csv", delimiter=",")
        assert grid.shape == (16, 12)       # rows = time, cols = crossline
        overlay = open(tmp_path / "pred_inline5_overlay.csv").read().strip().splitlines()
        assert overlay[0] == "time_ms,target,predicted"
        assert len(overlay) > 1

    def test_overlay_without_wells_exits_3(self, survey, sub_model, tmp_path):
        rc = cli.main([
            "volume", "--model", sub_model, "--cubes", *survey["cubes"],
            "--out", str(tmp_path / "p.sfcube"), "--slice", "0",
            "--overlay-well", "B", "--no-figures",
        ])
        assert rc == 3

    def test_slice_out_of_range_exits_2(self, survey, sub_model, tmp_path):
        rc = cli.main([
            "volume", "--model", sub_model, "--cubes", *survey["cubes"],
            "--out", str(tmp_path / "p.sfcube"), "--slice", "99", "--no-figures",
        ])
        assert rc == 2


class TestSelect:
    def test_trace_csv_and_stdout(self, survey, tmp_path, capsys):
        out = tmp_path / "trace.csv"
        rc = cli.main([
            "select", "--data", survey["merged"], "--out", str(out),
            "--epochs", "5", "--seed", "0", "--no-figures",
        ])
        assert rc == 0
        lines = open(out).read().strip().splitlines()
        assert lines[0] == "stage,attribute_added,cc"
        assert len(lines) >= 2
        stages = [int(l.split(",")[0]) for l in lines[1:]]
        assert stages == list(range(1, len(stages) + 1))
        printed = capsys.readouterr().out
        assert printed.startswith("selected: ")

    def test_candidate_subset_honored(self, survey, tmp_path):
        out = tmp_path / "trace.csv"
        rc = cli.main([
            "select", "--data", survey["merged"], "--out", str(out),
            "--candidates", "impedance,amplitude", "--epochs", "5",
            "--seed", "0", "--no-figures",
        ])
        assert rc == 0
        added = [l.split(",")[1] for l in open(out).read().strip().splitlines()[1:]]
        assert set(added) <= {"impedance", "amplitude"}

    def test_unknown_candidate_exits_2(self, survey, tmp_path):
        rc = cli.main([
            "select", "--data", survey["merged"], "--out", str(tmp_path / "t.csv"),
            "--candidates", "impedance,bogus", "--epochs", "2", "--no-figures",
        ])
        assert rc == 2


class TestParsing:
    def test_no_arguments_is_a_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main([])
        assert exc.value.code == 2
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["--help"])
        assert exc.value.code == 0
        assert "prep" in capsys.readouterr().out
