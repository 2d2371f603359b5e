"""
End-to-end tests: the ellipcert command line from matrix file to verdict.

Every command runs through click's CliRunner; exit codes are
0 certified, 1 refuted, 2 operational error.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner, Result

from ellipcert.cli.main import cli, parse_box
from ellipcert.shared.documents import load_certificate, save_certificate
from ellipcert.shared.exceptions import InvalidInputError
from ellipcert.shared.schema import InvariantPoint, to_rows
from tests.conftest import REFERENCE_A

pytestmark = pytest.mark.e2e


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def workdir(tmp_path: Path) -> Path:
    (tmp_path / "a.json").write_text(json.dumps(REFERENCE_A))
    return tmp_path


def _invoke(runner: CliRunner, *args: str | Path) -> Result:
    return runner.invoke(cli, [str(a) for a in args])


def _pipeline(runner: CliRunner, workdir: Path) -> tuple[Path, Path]:
    program = workdir / "program.json"
    cert = workdir / "cert.json"
    generated = _invoke(
        runner, "gen", "--input", workdir / "a.json", "--output", program
    )
    assert generated.exit_code == 0, generated.output
    result = _invoke(runner, "annotate", "--input", program, "--output", cert)
    assert result.exit_code == 0, result.output
    return program, cert


def _shrink_point(cert_path: Path, k: int) -> None:
    cert = load_certificate(cert_path)
    points = list(cert.points)
    old = points[k].array
    shrunk = old - 1e-3 * (1.0 + np.linalg.norm(old)) * np.eye(old.shape[0])
    points[k] = InvariantPoint(index=k, label=points[k].label, matrix=to_rows(shrunk))
    save_certificate(cert_path, cert.model_copy(update={"points": points}))


class TestGen:
    def test_reference_program(self, runner: CliRunner, workdir: Path) -> None:
        out = workdir / "program.json"
        result = _invoke(runner, "gen", "--input", workdir / "a.json", "--output", out)
        assert result.exit_code == 0, result.output
        assert "wrote 8 instructions (n = 2)" in result.output
        doc = json.loads(out.read_text())
        assert doc["A"] == REFERENCE_A
        assert doc["init_box"] == [1.0, 1.0]

    def test_scalar_program(self, runner: CliRunner, tmp_path: Path) -> None:
        (tmp_path / "a.json").write_text(json.dumps({"A": [[0.5]]}))
        out = tmp_path / "program.json"
        result = _invoke(runner, "gen", "--input", tmp_path / "a.json", "--output", out)
        assert result.exit_code == 0, result.output
        assert len(json.loads(out.read_text())["body"]) == 3

    def test_init_box_broadcast(self, runner: CliRunner, workdir: Path) -> None:
        out = workdir / "program.json"
        result = _invoke(
            runner,
            "gen",
            "--input",
            workdir / "a.json",
            "--init-box",
            "2.5",
            "--output",
            out,
        )
        assert result.exit_code == 0, result.output
        assert json.loads(out.read_text())["init_box"] == [2.5, 2.5]

    def test_non_square_matrix(self, runner: CliRunner, tmp_path: Path) -> None:
        (tmp_path / "a.json").write_text("[[1.0, 2.0]]")
        out = tmp_path / "program.json"
        result = _invoke(runner, "gen", "--input", tmp_path / "a.json", "--output", out)
        assert result.exit_code == 2
        assert "error:" in result.stderr
        assert not out.exists()

    def test_missing_input_file(self, runner: CliRunner, tmp_path: Path) -> None:
        result = _invoke(
            runner, "gen", "--input", tmp_path / "none.json", "--output", tmp_path / "p"
        )
        assert result.exit_code == 2


class TestAnnotate:
    def test_reference_certified(self, runner: CliRunner, workdir: Path) -> None:
        program, cert = _pipeline(runner, workdir)
        assert load_certificate(cert).certified
        result = _invoke(
            runner, "annotate", "--input", program, "--output", cert, "--matrices"
        )
        assert result.stdout.startswith("certificate: CERTIFIED")
        assert "V22" in result.stdout

    def test_unstable_system(self, runner: CliRunner, tmp_path: Path) -> None:
        (tmp_path / "a.json").write_text("[[1.1]]")
        program = tmp_path / "program.json"
        _invoke(runner, "gen", "--input", tmp_path / "a.json", "--output", program)
        result = _invoke(
            runner, "annotate", "--input", program, "--output", tmp_path / "cert.json"
        )
        assert result.exit_code == 2
        assert "stable" in result.stderr

    def test_safety_factor_scales_margin(
        self, runner: CliRunner, workdir: Path
    ) -> None:
        program, _ = _pipeline(runner, workdir)
        margins = []
        for safety in ("1.0", "4.0"):
            result = _invoke(
                runner,
                "annotate",
                "--input",
                program,
                "--output",
                workdir / f"cert-{safety}.json",
                "--safety-factor",
                safety,
                "--format",
                "json",
            )
            assert result.exit_code == 0, result.output
            summary = json.loads(result.stdout)
            assert summary["certified"] is True
            margins.append(summary["closure_margin"])
        assert margins[1] == pytest.approx(4.0 * margins[0], rel=1e-6)

    def test_safety_factor_below_one_rejected(
        self, runner: CliRunner, workdir: Path
    ) -> None:
        program, cert = _pipeline(runner, workdir)
        result = _invoke(
            runner,
            "annotate",
            "--input",
            program,
            "--output",
            cert,
            "--safety-factor",
            "0.5",
        )
        assert result.exit_code == 2


class TestCheck:
    def test_certified(self, runner: CliRunner, workdir: Path) -> None:
        program, cert = _pipeline(runner, workdir)
        result = _invoke(runner, "check", "--input", program, "--certificate", cert)
        assert result.exit_code == 0
        assert result.stdout.strip() == "CERTIFIED: all 10 obligations hold"

    def test_shrunk_point_refuted(self, runner: CliRunner, workdir: Path) -> None:
        program, cert = _pipeline(runner, workdir)
        _shrink_point(cert, 3)
        result = _invoke(
            runner,
            "check",
            "--input",
            program,
            "--certificate",
            cert,
            "--format",
            "json",
        )
        assert result.exit_code == 1
        verdict = json.loads(result.stdout)
        assert verdict["certified"] is False
        assert verdict["failures"][0]["index"] == 3
        assert verdict["failures"][0]["kind"] == "step-containment"

    def test_mismatched_program(self, runner: CliRunner, workdir: Path) -> None:
        _, cert = _pipeline(runner, workdir)
        (workdir / "b.json").write_text("[[0.5]]")
        other = workdir / "other.json"
        _invoke(runner, "gen", "--input", workdir / "b.json", "--output", other)
        result = _invoke(runner, "check", "--input", other, "--certificate", cert)
        assert result.exit_code == 2

    def test_corrupt_certificate(self, runner: CliRunner, workdir: Path) -> None:
        program, cert = _pipeline(runner, workdir)
        cert.write_text("{}")
        result = _invoke(runner, "check", "--input", program, "--certificate", cert)
        assert result.exit_code == 2


class TestBoundsAndSimulate:
    def test_bounds_json(self, runner: CliRunner, workdir: Path) -> None:
        _, cert = _pipeline(runner, workdir)
        result = _invoke(runner, "bounds", "--input", cert, "--format", "json")
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert [v["variable"] for v in report["variables"]] == ["y1", "y2", "x1", "x2"]
        assert report["ball_radius"] >= max(v["bound"] for v in report["variables"])

    def test_simulate_sound(self, runner: CliRunner, workdir: Path) -> None:
        program, cert = _pipeline(runner, workdir)
        result = _invoke(
            runner,
            "simulate",
            "--input",
            program,
            "--certificate",
            cert,
            "--trials",
            "200",
            "--cycles",
            "20",
            "--format",
            "json",
        )
        assert result.exit_code == 0, result.output
        report = json.loads(result.stdout)
        assert report["violations"] == 0
        assert report["samples"] == 208

    def test_simulate_catches_shrunk_point(
        self, runner: CliRunner, workdir: Path
    ) -> None:
        program, cert = _pipeline(runner, workdir)
        _shrink_point(cert, 5)
        result = _invoke(
            runner,
            "simulate",
            "--input",
            program,
            "--certificate",
            cert,
            "--trials",
            "20",
            "--cycles",
            "2",
        )
        assert result.exit_code == 1
        assert "VIOLATED" in result.stdout


class TestConfig:
    def test_config_file_sets_format(self, runner: CliRunner, workdir: Path) -> None:
        program, cert = _pipeline(runner, workdir)
        settings = workdir / "settings.yaml"
        settings.write_text("report:\n  format: json\n")
        result = _invoke(
            runner,
            "--config",
            settings,
            "check",
            "--input",
            program,
            "--certificate",
            cert,
        )
        assert result.exit_code == 0
        assert json.loads(result.stdout)["obligations"] == 10

    def test_invalid_config(self, runner: CliRunner, workdir: Path) -> None:
        program, cert = _pipeline(runner, workdir)
        settings = workdir / "settings.yaml"
        settings.write_text("checker:\n  tol: -1\n")
        result = _invoke(
            runner,
            "--config",
            settings,
            "check",
            "--input",
            program,
            "--certificate",
            cert,
        )
        assert result.exit_code == 2

    def test_version(self, runner: CliRunner) -> None:
        result = _invoke(runner, "--version")
        assert result.exit_code == 0
        assert "ellipcert" in result.stdout


class TestParseBox:
    def test_broadcast_and_list(self) -> None:
        assert parse_box("3", 2) == [3.0, 3.0]
        assert parse_box("1, 0.5", 2) == [1.0, 0.5]
        assert parse_box(None, 2) is None

    def test_wrong_count(self) -> None:
        with pytest.raises(InvalidInputError, match="1 or 3"):
            parse_box("1,2", 3)

    def test_not_a_number(self) -> None:
        with pytest.raises(InvalidInputError):
            parse_box("one", 1)
