"""
Tests for the gte-lm command line.
"""

import json
from pathlib import Path

import numpy as np
import pytest
import yaml

from gte_lm import __version__
from gte_lm.cli import main
from gte_lm.generators import generate_instance
from gte_lm.models import ProblemKind
from gte_lm.utils.io import load_problem

FIXTURES = Path(__file__).parent / "fixtures"
EXPECTED = yaml.safe_load((FIXTURES / "manifest.yaml").read_text())


def run_cli(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_version(capsys):
    code, out, _ = run_cli(capsys, "--version")
    assert code == 0
    assert __version__ in out


def test_generate_then_solve(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "generate", "--kind", "MTensor", "--orders", "3", "--dim", "6",
                           "--seed", "4", "--out-dir", str(tmp_path))
    assert code == 0
    manifest = out.strip()
    assert Path(manifest).exists()

    code, out, _ = run_cli(capsys, "solve", "--problem", manifest, "--require-converged")
    assert code == 0
    result = yaml.safe_load(out)
    assert result["solver"] == "levenberg_marquardt"
    assert result["status"] == "Converged"
    assert result["residual"] <= 1e-12
    assert len(result["x"]) == 6


def test_generate_is_byte_stable(tmp_path, capsys):
    for sub in ("a", "b"):
        run_cli(capsys, "generate", "--kind", "PlantedGeneral", "--orders", "4,3,2", "--dim", "3",
                "--seed", "11", "--out-dir", str(tmp_path / sub))
    for path in sorted((tmp_path / "a").iterdir()):
        assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes()


def test_generate_entry_range_and_out_alias(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "generate", "--kind", "PlantedGeneral", "--orders", "3,2", "--dim", "4",
                           "--seed", "5", "--range", "0.5,2", "--out", str(tmp_path))
    assert code == 0
    loaded = load_problem(out.strip())
    expected = generate_instance((3, 2), 4, ProblemKind.PLANTED_GENERAL, 5, entry_range=(0.5, 2.0))
    assert loaded.omega == expected.omega
    for got, want in zip(loaded.problem.coeffs, expected.problem.coeffs):
        np.testing.assert_array_equal(got.entries, want.entries)
        assert np.all(got.entries > 0.0)


@pytest.mark.parametrize("bad", ["1", "a,b", "2,1"])
def test_generate_rejects_bad_range(bad, tmp_path, capsys):
    code, _, _ = run_cli(capsys, "generate", "--kind", "PlantedGeneral", "--dim", "3", "--range", bad,
                         "--out", str(tmp_path))
    assert code == 2


def test_malformed_tensor_reports_line(tmp_path, capsys):
    path = tmp_path / "short.tensor"
    path.write_text("2 2\n1\n2\n3\n")
    code, _, err = run_cli(capsys, "classify", "--tensor", str(path), "--class", "p")
    assert code == 2
    assert f"{path}:4:" in err


@pytest.mark.parametrize("tensor,class_name,verdict", [
    (tensor, class_name, verdict)
    for tensor, classes in EXPECTED.items()
    for class_name, verdict in classes.items()
])
def test_classify_fixture(tensor, class_name, verdict, capsys):
    code, out, _ = run_cli(capsys, "classify", "--tensor", str(FIXTURES / tensor), "--class", class_name)
    assert code == 0
    report = yaml.safe_load(out)
    assert report["verdict"] == verdict
    assert report["checker"] == class_name


def test_classify_reports_witness(capsys):
    code, out, _ = run_cli(capsys, "classify", "--tensor", str(FIXTURES / "zplus_not_p.tensor"), "--class", "p")
    report = yaml.safe_load(out)
    assert report["witness"] == [0.0, -1.0]
    assert report["witness_value"] == 0.0


def test_solve_from_file_with_trace(tmp_path, capsys):
    x0 = tmp_path / "x0.vector"
    x0.write_text("2\n1.8\n2\n")
    trace = tmp_path / "trace.csv"
    code, out, _ = run_cli(capsys, "solve", "--problem", str(FIXTURES / "pd_multiple_roots_b6.yaml"),
                           "--x0-file", str(x0), "--trace", str(trace))
    assert code == 0
    result = yaml.safe_load(out)
    assert result["status"] == "Converged"
    assert result["x"][1] == pytest.approx(2.0, abs=1e-10)
    assert len(trace.read_text().splitlines()) == result["iterations"] + 2


def test_x0_file_conflicts_with_mode(tmp_path, capsys):
    x0 = tmp_path / "x0.vector"
    x0.write_text("2\n1.8\n2\n")
    code, _, err = run_cli(capsys, "solve", "--problem", str(FIXTURES / "pd_multiple_roots_b6.yaml"),
                           "--x0-file", str(x0), "--x0", "ones")
    assert code == 2
    assert "--x0-file" in err


def test_require_converged(capsys):
    code, out, _ = run_cli(capsys, "solve", "--problem", str(FIXTURES / "pd_multiple_roots_b6.yaml"),
                           "--max-iter", "1", "--require-converged")
    assert code == 1
    assert yaml.safe_load(out)["status"] == "MaxIterations"


def test_newton_fails_on_singular_jacobian(capsys):
    code, out, _ = run_cli(capsys, "solve", "--problem", str(FIXTURES / "singular_cube.yaml"),
                           "--solver", "newton", "--require-converged")
    assert code == 1
    assert yaml.safe_load(out)["status"] == "LinearSolveFailure"


def test_epsilon_out_of_range(capsys):
    code, _, _ = run_cli(capsys, "solve", "--problem", str(FIXTURES / "singular_cube.yaml"), "--epsilon", "3")
    assert code == 2


def test_log_json(tmp_path, capsys):
    log_path = tmp_path / "log.json"
    code, _, _ = run_cli(capsys, "solve", "--problem", str(FIXTURES / "singular_cube.yaml"),
                         "--log-json", str(log_path))
    assert code == 0
    entries = json.loads(log_path.read_text())
    assert entries[-1]["level"] == "INFO"
    assert entries[-1]["metadata"]["status"] == "Converged"


def test_config_defaults_and_precedence(tmp_path, capsys):
    config = tmp_path / "gte.yaml"
    config.write_text(yaml.safe_dump({"solve": {"max_iter": 1}}))
    problem = str(FIXTURES / "pd_multiple_roots_b6.yaml")

    code, _, _ = run_cli(capsys, "--config", str(config), "solve", "--problem", problem, "--require-converged")
    assert code == 1
    code, _, _ = run_cli(capsys, "--config", str(config), "solve", "--problem", problem,
                         "--max-iter", "1000", "--require-converged")
    assert code == 0


def test_config_from_environment(tmp_path, capsys, monkeypatch):
    config = tmp_path / "gte.yaml"
    config.write_text(yaml.safe_dump({"solve": {"max-iter": 1}}))
    monkeypatch.setenv("GTE_LM_CONFIG", str(config))
    code, _, _ = run_cli(capsys, "solve", "--problem", str(FIXTURES / "pd_multiple_roots_b6.yaml"),
                         "--require-converged")
    assert code == 1


def test_bad_config_section(tmp_path, capsys):
    config = tmp_path / "gte.yaml"
    config.write_text(yaml.safe_dump({"plot": {"dpi": 300}}))
    code, _, err = run_cli(capsys, "--config", str(config), "solve", "--problem",
                           str(FIXTURES / "singular_cube.yaml"))
    assert code == 2
    assert "unknown section" in err


def test_small_bench(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "bench", "--scenario", "Table1", "--shapes", "3,5", "--trials", "2",
                           "--epsilon", "2", "--out-dir", str(tmp_path))
    assert code == 0
    assert out.startswith("Table1:")
    assert "(3,5)" in out
    for name in ("table.csv", "table.txt", "trials.json", "trace_lm.csv", "trace_newton.csv"):
        assert (tmp_path / name).exists(), name


def test_bench_rejects_bad_shapes(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "bench", "--scenario", "Table1", "--shapes", "3,x", "--out-dir", str(tmp_path))
    assert code == 2


def test_trace_command(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "trace", "--shape", "3,10", "--seed", "2", "--out-dir", str(tmp_path))
    assert code == 0
    result = yaml.safe_load(out)
    assert result["shape"] == "(3,10)"
    assert result["lm"]["status"] == "Converged"
    assert (tmp_path / "trace_lm.csv").exists()
