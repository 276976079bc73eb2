"""Command-line interface: subcommands, formats, configuration layering and exit codes."""

import argparse
import csv
import io
import json
import subprocess
import sys

import pytest

from gausscorr import __version__
from gausscorr.cli import (EXIT_FAIL, EXIT_OK, EXIT_USAGE, OUT_DIR_ENV, SUBCOMMANDS, parse_grid_spec,
                           run)
from gausscorr.profiles import ConcaveProfile


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def constant_profile(tmp_path):
    path = tmp_path / "constant.json"
    path.write_text(ConcaveProfile.constant(0.3).to_json())
    return str(path)


class TestGridSpec:
    def test_parse(self):
        assert parse_grid_spec("m=0,0.5;c=-1;n=9") == {"m": [0.0, 0.5], "c": [-1.0], "n": [9.0]}

    @pytest.mark.parametrize("text", ["m", "m=", "m=a,b"])
    def test_bad(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_grid_spec(text)


class TestBoundsTable:
    def test_csv_rows(self):
        code, out, _ = invoke("bounds-table")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0].startswith(f"# gausscorr {__version__} config=")
        rows = list(csv.reader(lines[1:]))
        assert rows[0] == ["x", "err_upper_new", "err_upper_komatsu", "err_lower"]
        assert len(rows) == 11

    def test_reference_check_reports_the_x6_row(self):
        code, _, err = invoke("bounds-table", "--check-reference")
        assert code == EXIT_FAIL
        failures = json.loads(err)["failures"]
        assert {f["x"] for f in failures} == {6.0}

    def test_json_format(self):
        code, out, _ = invoke("bounds-table", "--format", "json", "--grid-spec", "x=0,1")
        doc = json.loads(out)
        assert code == EXIT_OK and doc["tool"] == "gausscorr" and len(doc["records"]) == 2


class TestExitCodes:
    def test_unknown_subcommand(self):
        assert invoke("frobnicate")[0] == EXIT_USAGE

    def test_missing_profile(self):
        assert invoke("linearize")[0] == EXIT_USAGE

    def test_unreadable_file(self, tmp_path):
        code, _, err = invoke("linearize", "--profile", str(tmp_path / "none.json"), "--interval", "-1,1")
        assert code == EXIT_USAGE and json.loads(err)["status"] == "usage-error"

    def test_help(self):
        assert invoke("--help")[0] == EXIT_OK

    @pytest.mark.parametrize("argv", [["bounds-table", "--tol", "-1"], ["bounds-table", "--format", "xml"]])
    def test_bad_values(self, argv):
        assert invoke(*argv)[0] == EXIT_USAGE


class TestCentredLayerCommand:
    def test_constant_profile_has_zero_margin(self, constant_profile):
        code, out, _ = invoke("verify-theorem1", "--profile", constant_profile, "--w", "0.5")
        assert code == EXIT_OK
        header, record = (json.loads(s) for s in out.splitlines())
        assert header["record"] == "header" and header["passed"]
        assert abs(record["margin"]) < 1e-12

    def test_infeasible_single_instance_is_usage_error(self, tmp_path):
        path = tmp_path / "line.json"
        path.write_text(ConcaveProfile.linear(1.0, 0.0).to_json())
        assert invoke("verify-theorem1", "--profile", str(path), "--w", "0.95")[0] == EXIT_USAGE

    def test_random_profiles(self):
        code, out, _ = invoke("verify-theorem1", "--trials", "3", "--grid-spec", "w=0.3,0.7")
        header = json.loads(out.splitlines()[0])
        assert code == EXIT_OK
        assert header["summary"]["reports"] + header["summary"]["skipped"] == 6


class TestOtherCommands:
    def test_linearize(self, tmp_path):
        path = tmp_path / "tent.json"
        path.write_text(ConcaveProfile((-2.0, 2.0), ((-1.0, 0.0), (0.0, 1.0), (1.0, 0.0))).to_json())
        code, out, _ = invoke("linearize", "--profile", str(path), "--interval", "-1,1")
        assert code == EXIT_OK
        assert json.loads(out)["passed"]

    def test_check_props(self):
        code, out, _ = invoke("check-props")
        assert code == EXIT_OK and json.loads(out)["passed"]

    def test_sidak(self):
        code, out, _ = invoke("verify-sidak", "--trials", "2", "--mc", "100000")
        assert code == EXIT_OK and len(out.splitlines()) == 3

    def test_problem2(self):
        code, out, _ = invoke("search-problem2", "--trials", "10", "--top", "3")
        doc = json.loads(out)
        assert code == EXIT_OK and doc["summary"]["completed"] + doc["summary"]["skipped"] == 10

    def test_every_subcommand_has_help(self):
        for sub in SUBCOMMANDS:
            assert invoke(sub, "--help")[0] == EXIT_OK


class TestConfigAndOutput:
    def test_config_file_and_flag_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\nformat = json\nseed = 5\n")
        code, out, _ = invoke("bounds-table", "--config", str(cfg), "--seed", "6", "--grid-spec", "x=1")
        doc = json.loads(out)
        assert code == EXIT_OK
        assert doc["config"]["seed"] == 6 and doc["config"]["format"] == "json"

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("colour = red\n")
        assert invoke("bounds-table", "--config", str(cfg))[0] == EXIT_USAGE

    def test_env_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path))
        code, out, _ = invoke("bounds-table")
        assert code == EXIT_OK and out == ""
        assert (tmp_path / "bounds-table.csv").read_text().count("\n") == 12

    def test_out_flag(self, tmp_path):
        dest = tmp_path / "sub" / "t.csv"
        assert invoke("bounds-table", "--out", str(dest))[0] == EXIT_OK
        assert dest.exists()

    def test_scan_extremal_is_deterministic(self):
        argv = ("scan-extremal", "--seed", "7", "--grid-spec", "m=0,1;c=-0.5,0.2;w=0.4;n=5")
        first = invoke(*argv)
        second = invoke(*argv)
        assert first[0] == EXIT_OK and first[1] == second[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gausscorr", "bounds-table", "--grid-spec", "x=0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1].startswith("0")
