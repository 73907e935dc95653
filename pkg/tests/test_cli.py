"""Command-line interface: exit codes, deterministic reports, CSV outputs."""

import json

import pytest

from starspec import cli


def run(capsys, *argv):
    code = cli.run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCertifyCommand:
    def test_certified_preset_exits_zero(self, capsys):
        code, out, _ = run(capsys, "certify", "--preset", "rect_two_eigs")
        assert code == cli.EXIT_CERTIFIED
        report = json.loads(out)
        assert report["verdict"] == "CertifiedNoResonance"
        assert report["n"] == 2
        assert report["rigor"] == "analytic"
        assert report["trace"]  # bound provenance is part of the report

    def test_output_is_byte_identical_across_runs(self, capsys):
        _, out1, _ = run(capsys, "certify", "--preset", "rect_two_eigs")
        _, out2, _ = run(capsys, "certify", "--preset", "rect_two_eigs")
        assert out1 == out2

    def test_heuristic_lower_bounds_are_inconclusive(self, capsys):
        code, out, _ = run(
            capsys,
            "certify", "configs/t_junction.json",
            "--lower-strategy", "fem_estimate",
            "--truncation", "2.0", "--levels", "1", "--no-stability",
        )
        assert code == cli.EXIT_INCONCLUSIVE
        report = json.loads(out)
        assert report["verdict"] == "Inconclusive"
        assert report["rigor"] == "heuristic"

    def test_report_written_to_file(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code, out, _ = run(
            capsys, "certify", "--preset", "cube_square", "-o", str(out_path)
        )
        assert code == cli.EXIT_CERTIFIED
        assert out == ""
        report = json.loads(out_path.read_text())
        assert report["n"] == 1

    def test_missing_config_exits_one(self, capsys):
        code, _, err = run(capsys, "certify", "no_such_file.json")
        assert code == cli.EXIT_ERROR
        assert "error" in err

    def test_unknown_preset_rejected(self, capsys):
        code, _, _ = run(capsys, "certify", "--preset", "bogus")
        assert code == cli.EXIT_ERROR


class TestSpectrumCommand:
    def test_equilateral_values(self, capsys):
        code, out, _ = run(
            capsys, "spectrum", "--shape", "equilateral",
            "--bc", "neumann", "--side", "1", "-k", "3",
        )
        assert code == 0
        report = json.loads(out)
        vals = report["values"]
        assert vals[0] == 0.0
        assert vals[1] == pytest.approx(16 * 3.141592653589793**2 / 9, rel=1e-12)
        assert vals[1] == vals[2]  # double eigenvalue

    def test_floats_carry_full_precision(self, capsys):
        _, out, _ = run(capsys, "spectrum", "--shape", "interval", "--bc", "DD", "-k", "1")
        import math

        report = json.loads(out)
        # printed floats round-trip exactly
        assert report["values"][0] == math.pi**2

    def test_bad_shape_arguments(self, capsys):
        code, _, _ = run(capsys, "spectrum", "--shape", "interval", "--bc", "XX")
        assert code == cli.EXIT_ERROR


class TestRegionCommand:
    def test_csv_header_and_grid_size(self, capsys):
        code, out, _ = run(capsys, "region", "--nx", "10", "--ny", "10")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x,y,inside,certified"
        assert len(lines) == 1 + 10 * 10

    def test_resolution_floor(self, capsys):
        code, _, err = run(capsys, "region", "--nx", "5", "--ny", "50")
        assert code == cli.EXIT_ERROR
        assert "resolution" in err


class TestMeshCommand:
    def test_text_dump_from_shipped_config(self, capsys):
        code, out, err = run(capsys, "mesh", "configs/t_junction.json", "--h0", "0.5")
        assert code == 0
        assert "nodes" in err
        assert out  # dump lands on stdout

    def test_svg_output(self, capsys):
        code, out, _ = run(
            capsys, "mesh", "configs/t_junction.json", "--h0", "0.5", "--format", "svg"
        )
        assert code == 0
        assert "<svg" in out


class TestSweepCommand:
    def test_small_bent_guide_sweep(self, capsys):
        code, out, err = run(
            capsys,
            "sweep", "--family", "broken",
            "--start", "1.0", "--stop", "1.02", "--step", "0.01",
        )
        assert code == cli.EXIT_CERTIFIED
        lines = out.strip().splitlines()
        assert lines[0] == "param,nu,verdict,n,dn_margin"
        assert len(lines) == 4
        assert all("CertifiedNoResonance" in ln for ln in lines[1:])
        assert "first certified" in err


class TestReproCommand:
    def test_fast_targets(self, capsys):
        code, out, _ = run(capsys, "repro", "rect_two_eigs", "cube_square", "cube_disk")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 3
        assert all(ln.endswith("PASS") for ln in lines)
