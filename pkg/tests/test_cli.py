import json

import numpy as np
import pytest

from instanton import cli


def run_cli(args):
    return cli.main([str(a) for a in args])


def load_results(out_dir):
    with open(out_dir / "results.json") as fh:
        return json.load(fh)


class TestDoubleWellCommand:
    def test_basic_run(self, tmp_path):
        code = run_cli(["double-well", "--hbar", 0.1, "--out", tmp_path])
        assert code == 0
        res = load_results(tmp_path)
        assert res["schema_version"] == 1
        assert res["command"] == "double-well"
        block = res["results"]
        assert block["s0"]["value"] == pytest.approx(1.0 / 6.0, rel=1e-8)
        assert block["delta_e_instanton"]["value"] == pytest.approx(6.73955e-2, rel=1e-3)
        assert block["delta_e_oracle"]["value"] == pytest.approx(3.199117e-2, rel=1e-3)
        assert "delta_e_wkb" in block

    def test_determinism(self, tmp_path):
        d1 = tmp_path / "a"
        d2 = tmp_path / "b"
        for d in (d1, d2):
            d.mkdir()
            assert run_cli(["double-well", "--hbar", 0.12, "--out", d]) == 0
        assert (d1 / "results.json").read_bytes() == (d2 / "results.json").read_bytes()

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"hbar": 0.2}))
        out = tmp_path / "out"
        assert run_cli(["double-well", "--config", cfg, "--hbar", 0.1, "--out", out]) == 0
        res = load_results(out)
        assert res["config"]["hbar"] == 0.1

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"hbar": 0.2, "hbaar": 0.3}))
        out = tmp_path / "out"
        code = run_cli(["double-well", "--config", cfg, "--out", out])
        assert code == 2
        assert not (out / "results.json").exists()

    def test_json_only_format(self, tmp_path):
        assert run_cli(["double-well", "--hbar", 0.1, "--out", tmp_path, "--format", "json"]) == 0
        assert (tmp_path / "results.json").exists()
        assert not list(tmp_path.glob("*.csv"))


class TestSweepCommand:
    def test_sweep_csv(self, tmp_path):
        code = run_cli(
            [
                "sweep",
                "double-well",
                "--parameter",
                "hbar",
                "--start",
                0.05,
                "--stop",
                0.2,
                "--steps",
                4,
                "--out",
                tmp_path,
            ]
        )
        assert code == 0
        lines = (tmp_path / "sweep.csv").read_text().strip().splitlines()
        assert lines[0].startswith("hbar,")
        assert len(lines) == 5
        col = [float(row.split(",")[0]) for row in lines[1:]]
        assert col == sorted(col)
        assert col[0] == pytest.approx(0.05) and col[-1] == pytest.approx(0.2)

    def test_sweep_is_deterministic(self, tmp_path):
        d1 = tmp_path / "a"
        d2 = tmp_path / "b"
        for d in (d1, d2):
            d.mkdir()
            assert (
                run_cli(
                    [
                        "sweep",
                        "double-well",
                        "--parameter",
                        "hbar",
                        "--start",
                        0.08,
                        "--stop",
                        0.16,
                        "--steps",
                        3,
                        "--out",
                        d,
                    ]
                )
                == 0
            )
        assert (d1 / "sweep.csv").read_bytes() == (d2 / "sweep.csv").read_bytes()

    def test_empty_sweep_rejected(self, tmp_path):
        out = tmp_path / "out"
        code = run_cli(
            [
                "sweep",
                "double-well",
                "--parameter",
                "hbar",
                "--start",
                0.1,
                "--stop",
                0.2,
                "--steps",
                0,
                "--out",
                out,
            ]
        )
        assert code == 2
        assert not out.exists() or not list(out.iterdir())


class TestFamilyCommands:
    def test_charge_band(self, tmp_path):
        code = run_cli(["charge", "--ej", 50.0, "--ec", 1.0, "--out", tmp_path])
        assert code == 0
        res = load_results(tmp_path)
        block = res["results"]
        ratio = block["bandwidth_instanton"]["value"] / block["bandwidth_oracle"]["value"]
        assert 0.9 < ratio < 1.1
        band = (tmp_path / "band.csv").read_text().strip().splitlines()
        assert len(band) > 8

    def test_washboard(self, tmp_path):
        code = run_cli(
            ["washboard", "--ie", 0.9, "--ic", 1.0, "--ej", 1.0, "--ec", 0.02, "--out", tmp_path]
        )
        assert code == 0
        res = load_results(tmp_path)
        assert res["results"]["gamma"]["value"] > 0
        assert res["results"]["s0"]["value"] > 0

    def test_flux(self, tmp_path):
        code = run_cli(
            [
                "flux",
                "--ej",
                1.0,
                "--el",
                0.5,
                "--ec",
                0.005,
                "--phi-e",
                np.pi,
                "--out",
                tmp_path,
            ]
        )
        assert code == 0
        res = load_results(tmp_path)
        assert res["results"]["delta_e_instanton"]["value"] > 0

    def test_gl_cpr(self, tmp_path):
        code = run_cli(["gl-cpr", "--l-over-zeta", 0.8, "--out", tmp_path])
        assert code == 0
        rows = (tmp_path / "cpr.csv").read_text().strip().splitlines()
        header = rows[0].split(",")
        assert "current" in header and "deviation" in header
        assert len(rows) == 65

    def test_washboard_with_gl_correction(self, tmp_path):
        base = tmp_path / "plain"
        corr = tmp_path / "corr"
        base.mkdir()
        corr.mkdir()
        common = ["washboard", "--ie", 0.9, "--ic", 1.0, "--ej", 1.0, "--ec", 0.02]
        assert run_cli(common + ["--out", base]) == 0
        assert (
            run_cli(common + ["--with-gl-correction", "--l-over-zeta", 0.8, "--out", corr]) == 0
        )
        g0 = load_results(base)["results"]["gamma"]["value"]
        g1 = load_results(corr)["results"]["gamma"]["value"]
        assert g1 != g0

    def test_oracle_command(self, tmp_path):
        code = run_cli(
            ["oracle", "--family", "quartic-double-well", "--hbar", 0.1, "--out", tmp_path]
        )
        assert code == 0
        res = load_results(tmp_path)
        levels = res["results"]["energies"]["value"]
        assert levels[1] - levels[0] == pytest.approx(3.199117e-2, rel=1e-4)

    def test_wkb_command(self, tmp_path):
        from instanton import potentials, wkb

        code = run_cli(["wkb", "--hbar", 0.02, "--out", tmp_path])
        assert code == 0
        res = load_results(tmp_path)
        lib = wkb.quantize(potentials.QuarticDoubleWell(), hbar=0.02, n_max=0)
        assert res["results"]["parity_split_0"]["value"] == pytest.approx(
            lib[0].parity_split, rel=1e-12
        )

    def test_poly_bounce_mode(self, tmp_path):
        code = run_cli(
            ["double-well", "--g", -0.1, "--bigN", 2, "--hbar", 1.0, "--out", tmp_path]
        )
        assert code == 0
        res = load_results(tmp_path)
        assert res["results"]["im_e0"]["value"] == pytest.approx(8.1745e-6, rel=5e-3)

    def test_invalid_value_rejected(self, tmp_path):
        code = run_cli(["washboard", "--ie", 1.5, "--ic", 1.0, "--out", tmp_path])
        assert code == 2
