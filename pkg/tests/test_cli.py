import json
import math
import subprocess
import sys

import pytest

from shentropy import io as shio
from shentropy.cli import main, parse_grid, EXIT_IO, EXIT_NO_CONVERGENCE, EXIT_USAGE


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture
def field(tmp_path):
    path = tmp_path / "f.csv"
    assert run("synth", "--shape", "random-bandlimited", "--lmax", 7, "--seed", 42, "--output", path) == 0
    return path


def test_synth_and_analyze(tmp_path, field, capsys):
    out = tmp_path / "c.json"
    assert run("analyze", "--input", field, "--output", out) == 0
    text = capsys.readouterr().out
    assert "Parseval" in text
    assert shio.read_pyramid(out).L == 11
    assert (tmp_path / "c.spectrum.csv").exists()


def test_analyze_unit_sphere(tmp_path, capsys):
    f, c = tmp_path / "s.csv", tmp_path / "s.json"
    assert run("synth", "--shape", "unit-sphere", "--grid", "gauss:4", "--output", f) == 0
    assert run("analyze", "--input", f, "--output", c, "--lmax", 4) == 0
    pyr = shio.read_pyramid(c)
    assert pyr[0, 0] == pytest.approx(math.sqrt(4 * math.pi), abs=1e-13)
    assert max(abs(v) for v in pyr.coeffs[0, 1:]) < 1e-12


def test_analyze_band_limit_exit_code(tmp_path, field, capsys):
    assert run("analyze", "--input", field, "--output", tmp_path / "x.json", "--lmax", 40) == EXIT_USAGE
    assert "band limit" in capsys.readouterr().err


def test_reconstruct_reports_residual(tmp_path, field, capsys):
    assert run("reconstruct", "--input", field, "--order", 11, "--output", tmp_path / "r.csv") == 0
    line = [l for l in capsys.readouterr().out.splitlines() if "residual" in l][0]
    assert float(line.split(":")[1]) < 1e-8


def test_reconstruct_from_coefficients(tmp_path, field):
    c = tmp_path / "c.json"
    run("analyze", "--input", field, "--output", c)
    out = tmp_path / "r.csv"
    assert run("reconstruct", "--input", c, "--order", 7, "--grid", "equiangular:20x24", "--output", out) == 0
    assert shio.read_field(out).grid.shape == (20, 24)


def test_select_order_random_degree_7(tmp_path, field, capsys):
    report = tmp_path / "r.json"
    assert run("select-order", "--input", field, "--output", report) == 0
    assert json.loads(report.read_text())["selected_order"] == 7
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == ["J", "SHE", "decision"]
    assert "selected order: 7" in out


def test_select_order_unit_sphere(tmp_path, capsys):
    f = tmp_path / "s.csv"
    run("synth", "--shape", "unit-sphere", "--output", f)
    assert run("select-order", "--input", f) == 0
    assert "selected order: 0" in capsys.readouterr().out


def test_select_order_flowchart(tmp_path, capsys):
    f = tmp_path / "b.csv"
    run("synth", "--shape", "radial-harmonic-bump", "--amplitude", 2, 0, 0.2, "--amplitude", 4, 1, 0.1, 0.05,
        "--grid", "gauss:8", "--output", f)
    assert run("select-order", "--input", f, "--criterion", "flowchart") == 0
    assert "selected order: 4 (flowchart)" in capsys.readouterr().out


def test_select_order_no_convergence(tmp_path, field, capsys):
    report = tmp_path / "r.json"
    assert run("select-order", "--input", field, "--lmax", 8, "--output", report) == EXIT_NO_CONVERGENCE
    assert json.loads(report.read_text())["selected_order"] == -1


def test_entropy_and_spectrum(tmp_path, field, capsys):
    she = tmp_path / "she.csv"
    assert run("entropy", "--input", field, "--output", she, "--log-base", 2) == 0
    assert len(she.read_text().splitlines()) == 13
    spec = tmp_path / "s.csv"
    assert run("spectrum", "--input", field, "--lmax", 7, "--output", spec) == 0
    assert len(spec.read_text().splitlines()) == 65


@pytest.mark.parametrize("args", [
    ("select-order", "--epsilon", "-1"),
    ("select-order", "--window", "0"),
    ("entropy", "--log-base", "one"),
    ("reconstruct", "--lmax", "3", "--order", "5", "--output", "x.csv"),
    ("reconstruct", "--grid", "hex:3", "--output", "x.csv"),
    ("spectrum",),
])
def test_validation_exit_codes(field, args, capsys):
    assert run(args[0], "--input", field, *args[1:]) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("error:")


def test_io_exit_codes(tmp_path, capsys):
    assert run("analyze", "--input", tmp_path / "missing.csv", "--output", tmp_path / "x.json") == EXIT_IO
    bad = tmp_path / "bad.csv"
    bad.write_text("theta,phi,weight,v0\n1,2,3\n")
    assert run("analyze", "--input", bad, "--output", tmp_path / "x.json") == EXIT_IO
    assert "bad.csv:2:" in capsys.readouterr().err


def test_argparse_usage_exit():
    with pytest.raises(SystemExit) as exc:
        run("analyze")
    assert exc.value.code == 2


def test_parse_grid():
    assert parse_grid("gauss:5").shape == (6, 12)
    assert parse_grid("equiangular:51").n_nodes == 2601
    assert parse_grid("equiangular:61x61").n_nodes == 3721


def test_bench_small(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert run("bench", "--lmax", 4, 8, "--points", 100, "--budget", 0.01, "--output", out) == 0
    text = capsys.readouterr().out
    assert "L^" in text and "speedup" in text
    assert len(out.read_text().splitlines()) == 5


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "shentropy", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "select-order" in proc.stdout
