import csv

import numpy as np
import pytest

from gwig import cli
from gwig.config import ConfigError, parse_config, parse_matrix, parse_vector


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestConfig:
    def test_defaults(self):
        cfg = parse_config("")
        assert (cfg.a, cfg.beta, cfg.w, cfg.z, cfg.seed) == (1.0, 10.0, 2.0, (1.0,), 0)
        assert not cfg.dimensional

    def test_values_and_comments(self):
        cfg = parse_config("a = 0.5  # core radius\n\nbeta = 8\nz = 1, 2, 3\nn = 64\n")
        assert (cfg.a, cfg.beta, cfg.z, cfg.n) == (0.5, 8.0, (1.0, 2.0, 3.0), 64)

    @pytest.mark.parametrize("text", [
        "a = 0", "a = -1", "beta = nan", "colour = red", "a = 1\na = 2", "n = 3", "r_max = 0.5",
        "kappa = 1.0", "Q = 1e-19", "a 1", "n = 2.5", "wave_sizes = 32, 48, 64",
    ])
    def test_rejected(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_parsers(self):
        assert parse_vector("1, 2.5") == (1.0, 2.5)
        assert parse_matrix("2,1;1,2") == ((2.0, 1.0), (1.0, 2.0))
        with pytest.raises(ConfigError):
            parse_matrix("1,2;3")


class TestParticle:
    def test_csv_and_svg(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "n = 400\nr_max = 20\n")
        assert cli.main(["particle", "--config", cfg, "--out-dir", str(tmp_path)]) == 0
        with open(tmp_path / "particle.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == list(cli.PARTICLE_COLUMNS)
        assert len(rows) == 401
        unit = [row for row in rows[1:] if float(row[0]) == 1.0]
        assert len(unit) == 1 and float(unit[0][1]) == 1.0
        svg = (tmp_path / "particle.svg").read_text()
        assert svg.startswith("<svg") or svg.startswith("<?xml")
        assert "polyline" in svg

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, "n = 200\n")
        out1, out2 = tmp_path / "one", tmp_path / "two"
        out1.mkdir()
        out2.mkdir()
        cli.main(["particle", "--config", cfg, "--out-dir", str(out1)])
        cli.main(["particle", "--config", cfg, "--out-dir", str(out2)])
        assert (out1 / "particle.csv").read_bytes() == (out2 / "particle.csv").read_bytes()
        assert (out1 / "particle.svg").read_bytes() == (out2 / "particle.svg").read_bytes()

    def test_dimensional_columns(self):
        cfg = parse_config("n = 10\nQ = 1.602176634e-19\nepsilon0 = 8.8541878128e-12\na = 1e-15")
        header, columns = cli.particle_table(cfg)
        assert header[-4:] == list(cli.DIMENSIONAL_COLUMNS)
        np.testing.assert_allclose(columns[7], columns[0] * 1e-15)


class TestVerify:
    def test_report_is_deterministic(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "seed = 0\n")
        reports = []
        for sub in ("one", "two"):
            (tmp_path / sub).mkdir()
            assert cli.main(["verify", "--config", cfg, "--out-dir", str(tmp_path / sub)]) == 0
            reports.append((tmp_path / sub / "report.txt").read_bytes())
        assert reports[0] == reports[1]
        text = reports[0].decode()
        assert "overall = pass" in text
        assert "charge_sign_convention" in text
        assert "check.verifier.total_charge_a0.01.notes" in text


class TestWave:
    def test_order(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "wave_sizes = 32, 64, 128\n")
        assert cli.main(["wave", "--config", cfg, "--out-dir", str(tmp_path)]) == 0
        with open(tmp_path / "wave.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 3
        assert float(rows[-1]["fitted_order"]) >= 1.9

    def test_time_dependent_dilation_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "wave_time_rate = 0.5\n")
        assert cli.main(["wave", "--config", cfg, "--out-dir", str(tmp_path)]) == 2
        assert "error" in capsys.readouterr().err


class TestMetric:
    def test_tables(self, capsys):
        assert cli.main(["metric", "--g", "1,0;0,-1", "--kappa", "0.5", "--z", "1,1"]) == 0
        out = capsys.readouterr().out
        assert "g_hat_W = 0.5, 0; 0, -0.5" in out
        assert "g_hat_R = 2, 0; 0, -2" in out
        assert "chi = 0.5, 0.5" in out and "sigma = 2" in out

    def test_asymmetric(self, capsys):
        assert cli.main(["metric", "--g", "1,2;0,1", "--kappa", "0.1"]) == 2

    def test_needs_metric(self, capsys):
        assert cli.main(["metric"]) == 2


class TestUsage:
    def test_missing_config_file(self, tmp_path, capsys):
        assert cli.main(["particle", "--config", str(tmp_path / "absent.cfg")]) == 2
        assert "usage" in capsys.readouterr().err

    def test_missing_subcommand(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main([])
        assert info.value.code == 2
