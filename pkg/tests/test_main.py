import csv
import filecmp
import json
import logging
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from fourier_mixing import __version__
from fourier_mixing.__main__ import main, parse_args
from fourier_mixing.fourier import dump_distribution
from fourier_mixing.montecarlo import TourInstance, exact_gibbs_average
from fourier_mixing.reports import read_report
from fourier_mixing.symrep import Partition
from fourier_mixing.walks.bounds import (
    BoundReport,
    average_tv_sandwich,
    tabloid_cycle_bound,
)

# Four cities whose four longest legs add up to 0.8
SMALL = np.array(
    [
        [0.0, 0.1, 0.2, 0.15],
        [0.1, 0.0, 0.25, 0.2],
        [0.2, 0.25, 0.0, 0.15],
        [0.15, 0.2, 0.15, 0.0],
    ]
)


def test_cli_version():
    cmd = [sys.executable, "-m", "fourier_mixing", "--version"]
    assert subprocess.check_output(cmd).decode().strip() == __version__


def test_cli_script_entrypoint_version():
    """Check that the entrypoint defined in [project.scripts] inside
    pyproject.toml works"""
    cmd = ["fourier-mixing", "--version"]
    assert subprocess.check_output(cmd).decode().strip() == __version__


@pytest.mark.parametrize(
    "level_str, level_const",
    [
        ("DEBUG", logging.DEBUG),
        ("INFO", logging.INFO),
        ("WARNING", logging.WARNING),
        ("ERROR", logging.ERROR),
        ("CRITICAL", logging.CRITICAL),
    ],
)
def test_parse_log_level(level_str, level_const):
    args = parse_args(["-l", level_str, "chars", "--n", "3"])
    assert args.log_level == level_const


@pytest.fixture
def q1_file(tmp_path: Path, q1) -> Path:
    path = tmp_path / "q1.json"
    dump_distribution(q1, path)
    return path


@pytest.fixture
def q2_file(tmp_path: Path, q2) -> Path:
    path = tmp_path / "q2.json"
    dump_distribution(q2, path)
    return path


class TestCommands:
    """Running subcommands end to end through main()"""

    def test_chars_to_stdout(self, capsys):
        assert main(["chars", "--n", "3"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["shapes"][0] == "3"
        assert "2+1" in data["shapes"]
        assert data["values"][0] == [1, 1, 1]

    def test_bounds_report(self, tmp_path: Path, q1, q1_file: Path, three_points):
        output = tmp_path / "bounds.json"
        argv = ["bounds", "--dist", f"file:{q1_file}", "--tabloids", "2+1"]
        assert main(argv + ["--N", "2", "--output", str(output)]) == 0

        report = BoundReport.from_json(read_report(output)["report"])
        expected = average_tv_sandwich(q1, three_points, 2)
        assert report.steps == 2
        assert math.isclose(report.upper_avg, expected.upper_avg)
        assert math.isclose(report.lower_avg, expected.lower_avg)

    def test_cycle_curve(self, tmp_path: Path):
        output = tmp_path / "curve.csv"
        argv = ["bounds", "--sweep-N", "1:5", "--class-cycle", "3"]
        assert main(argv + ["--tabloids", "4+2", "--output", str(output)]) == 0

        with open(output, newline="") as f:
            rows = list(csv.DictReader(f))
        assert [int(row["N"]) for row in rows] == [1, 2, 3, 4, 5]
        for row in rows:
            expected = tabloid_cycle_bound(6, 4, 2, 3, int(row["N"]))
            assert float(row["bound"]) == expected

    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    def test_deck_curve_matches_baseline(self, tmp_path: Path, k, deck_baselines):
        output = tmp_path / f"k{k}.csv"
        argv = ["bounds", "--tabloids", "26+26", "--class-cycle", str(k)]
        assert main(argv + ["--sweep-N", "1:400", "--output", str(output)]) == 0

        with open(output, newline="") as f:
            rows = [(int(r["N"]), float(r["bound"])) for r in csv.DictReader(f)]
        assert [steps for steps, _ in rows] == list(range(1, 401))
        for (_, value), (_, expected) in zip(rows, deck_baselines[k]):
            assert math.isclose(value, expected, rel_tol=1e-9)

    def test_switched_word(self, capsys):
        argv = ["bounds", "--dist", "lazy_transposition", "--class-cycle", "3"]
        assert main(argv + ["--tabloids", "3+1", "--word", "0,1"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["word"] == [0, 1]
        # A 3-cycle step annihilates the only nontrivial component
        assert data["tv_sq_bound"] == 0.0

    def test_lazy_transposition_spec(self, capsys):
        argv = ["bounds", "--tabloids", "3+1", "--dist", "lazy_transposition:4"]
        assert main(argv + ["--N", "2"]) == 0
        data = json.loads(capsys.readouterr().out)
        # the walk acts on S^(3,1) by 1/2, so the bound is 3/4 (1/2)^4
        assert math.isclose(data["per_state_tv_sq"], 3 / 64)

    def test_jsr_and_certificate_files(
        self, tmp_path: Path, q1_file: Path, q2_file: Path
    ):
        output = tmp_path / "jsr.json"
        argv = ["jsr", "--dist", f"file:{q1_file}", "--dist", f"file:{q2_file}"]
        argv += ["--tabloids", "2+1", "--depth", "2", "--tolerance", "0.1"]
        assert main(argv + ["--output", str(output)]) == 0

        result = read_report(output)
        assert result["verdict"] == "mixes"
        certificate = tmp_path / "jsr_2+1_certificate.json"
        matrices = tmp_path / "jsr_2+1_matrices.json"
        assert certificate.exists()
        assert matrices.exists()

        verify = ["verify-cert", str(certificate), "--matrices", str(matrices)]
        assert main(verify) == 0

        data = json.loads(certificate.read_text())
        data["gamma"] = 0.15
        certificate.write_text(json.dumps(data))
        assert main(verify) == 1

    def test_simulate_is_deterministic(self, tmp_path: Path, q1_file: Path):
        argv = ["simulate", "--dist", f"file:{q1_file}", "--tabloids", "2+1"]
        argv += ["--N", "3", "--M", "200", "--seed", "7"]
        first = tmp_path / "first.json"
        second = tmp_path / "second.json"
        assert main(argv + ["--output", str(first)]) == 0
        assert main(argv + ["--output", str(second)]) == 0

        assert filecmp.cmp(first, second)
        data = read_report(first)
        assert sum(data["counts"].values()) == 200
        assert 0.0 <= data["tv_to_exact"] <= 1.0

    def test_estimate_point_frequency(self, tmp_path: Path):
        output = tmp_path / "estimate.json"
        argv = ["estimate", "--tabloids", "3+1", "--dist", "lazy_transposition:4:0.5"]
        assert main(argv + ["--epsilon", "0.2", "--output", str(output)]) == 0

        data = read_report(output)
        assert data["N"] == 6
        assert data["exact"] == 0.25
        assert math.isclose(data["radius"], 0.2)

    def test_estimate_annealing(self, tmp_path: Path):
        matrix = tmp_path / "small.csv"
        np.savetxt(matrix, SMALL, delimiter=",")
        output = tmp_path / "annealing.json"
        argv = ["estimate", "--tours", "4", "--matrix", str(matrix)]
        argv += ["--dist", "lazy_transposition:4:0.5", "--beta", "0.5"]
        assert main(argv + ["--output", str(output)]) == 0

        data = read_report(output)
        assert data["N"] == 5
        assert data["beta"] == 0.5
        exact = exact_gibbs_average(TourInstance(SMALL), 0.5)
        assert math.isclose(data["exact"], exact)

    def test_config_file_overrides_flags(self, tmp_path: Path, q1_file: Path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"steps": 3, "replicas": 50}))
        output = tmp_path / "simulate.json"
        argv = ["simulate", "--dist", f"file:{q1_file}", "--tabloids", "2+1"]
        argv += ["--N", "1", "--config", str(config), "--output", str(output)]
        assert main(argv) == 0

        data = read_report(output)
        assert data["N"] == 3
        assert data["M"] == 50

    def test_unknown_config_key(self, tmp_path: Path, caplog):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"colour": "blue"}))
        with caplog.at_level(logging.ERROR):
            assert main(["chars", "--n", "3", "--config", str(config)]) == 2
        assert "Unknown configuration keys: colour" in caplog.text

    @pytest.mark.parametrize(
        "argv",
        [
            ["bounds", "--tabloids", "2+1", "--dist", "bogus"],
            ["bounds", "--tabloids", "2+1"],
            ["bounds", "--tabloids", "2+1", "--dist", "uniform", "--sweep-N", "3"],
            ["simulate", "--tabloids", "2+1", "--dist", "uniform", "--N", "-1"],
            ["fourier", "--space", "tours", "--dist", "uniform"],
        ],
    )
    def test_bad_arguments(self, argv):
        assert main(argv) == 2

    def test_fourier(self, capsys, q2_file: Path):
        argv = ["fourier", "--tabloids", "2+1", "--dist", f"file:{q2_file}"]
        assert main(argv) == 0
        transforms = json.loads(capsys.readouterr().out)["transforms"]
        standard = transforms[str(Partition((2, 1)))]
        assert standard["dim"] == 2
        assert standard["multiplicity"] == 1
        assert math.isclose(standard["operator_norm"], 0.25)
        assert sorted(standard["eigenvalue_magnitudes"]) == pytest.approx([0, 0.125])
