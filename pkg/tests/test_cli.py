"""End-to-end tests of the command line front end."""

import json
import subprocess
import sys

import pytest

from grcim import BoundParams, generate_hadamard, upper_bound_ber
from grcim.cli import _parse_snr_grid, main


class TestSnrGridParsing:
    def test_range_inclusive_of_stop(self):
        assert _parse_snr_grid("0:8:2") == (0.0, 2.0, 4.0, 6.0, 8.0)

    def test_range_stop_off_grid(self):
        assert _parse_snr_grid("0:7:2") == (0.0, 2.0, 4.0, 6.0)

    def test_fractional_step(self):
        assert _parse_snr_grid("1:2:0.5") == (1.0, 1.5, 2.0)

    def test_comma_list(self):
        assert _parse_snr_grid("1.5,3,4") == (1.5, 3.0, 4.0)

    @pytest.mark.parametrize("bad", ["a:b:c", "5:1:1", "0:8:0", "1:2:3:4", "abc"])
    def test_malformed_grids_rejected(self, bad):
        from argparse import ArgumentTypeError
        with pytest.raises(ArgumentTypeError):
            _parse_snr_grid(bad)


class TestCodebookCommand:
    def test_json_payload(self, capsys):
        assert main(["codebook", "--lc", "8", "--nu", "2", "--nc", "2"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["length"] == 8
        assert payload["rows"] == generate_hadamard(8).matrix.tolist()
        assert payload["assignment"] == {"1": [0, 1], "2": [2, 3]}

    def test_out_file_matches_stdout(self, tmp_path, capsys):
        out = tmp_path / "book.json"
        main(["codebook", "--lc", "4", "--nu", "2", "--nc", "2", "--out", str(out)])
        assert capsys.readouterr().out == ""
        from_file = json.loads(out.read_text())
        main(["codebook", "--lc", "4", "--nu", "2", "--nc", "2"])
        assert from_file == json.loads(capsys.readouterr().out)

    def test_overfull_grouping_fails_cleanly(self, capsys):
        code = main(["codebook", "--lc", "8", "--nu", "3", "--nc", "4"])
        assert code == 2
        assert "error:" in capsys.readouterr().err


class TestAnalyzeCommand:
    def test_header_and_bound_values(self, capsys):
        assert main([
            "analyze", "--nt", "2", "--nu", "2", "--lc", "8", "--nc", "2",
            "--snr-db", "0:8:4",
        ]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "snr_db,bound_ber,flags"
        assert len(lines) == 4
        for line, snr_db in zip(lines[1:], (0.0, 4.0, 8.0)):
            grid_v, bound_v, flag = line.split(",")
            assert float(grid_v) == snr_db
            expected = upper_bound_ber(BoundParams(
                num_tx_antennas=2,
                codes_per_user=2,
                code_length=8,
                power_coeff=0.5,
                chip_snr=10.0 ** (snr_db / 10.0),
            ))
            assert float(bound_v) == pytest.approx(expected, rel=1e-9)
            assert flag == "ok"

    def test_loose_bound_flagged(self, capsys):
        main([
            "analyze", "--nt", "1", "--nu", "2", "--lc", "8", "--nc", "4",
            "--snr-db=-10,-5",
        ])
        lines = capsys.readouterr().out.strip().split("\n")
        assert all(line.endswith(",bound_loose") for line in lines[1:])

    def test_sigma_shapes_power_coefficient(self, capsys):
        main([
            "analyze", "--nt", "2", "--nu", "2", "--lc", "8", "--nc", "2",
            "--sigma", "1,4", "--snr-db", "6",
        ])
        bound_v = capsys.readouterr().out.strip().split("\n")[1].split(",")[1]
        expected = upper_bound_ber(BoundParams(
            num_tx_antennas=2,
            codes_per_user=2,
            code_length=8,
            power_coeff=0.8,
            chip_snr=10.0 ** 0.6,
        ))
        assert float(bound_v) == pytest.approx(expected, rel=1e-9)

    def test_out_file(self, tmp_path):
        out = tmp_path / "bound.csv"
        main([
            "analyze", "--nt", "2", "--nu", "1", "--lc", "8", "--nc", "2",
            "--snr-db", "0:4:2", "--out", str(out),
        ])
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "snr_db,bound_ber,flags"
        assert len(lines) == 4

    def test_bad_grid_exits_via_argparse(self, capsys):
        with pytest.raises(SystemExit):
            main(["analyze", "--nt", "2", "--nu", "1", "--lc", "8", "--nc", "2",
                  "--snr-db", "nope"])
        capsys.readouterr()

    def test_invalid_config_fails_cleanly(self, capsys):
        code = main(["analyze", "--nt", "2", "--nu", "1", "--lc", "6", "--nc", "2",
                     "--snr-db", "0"])
        assert code == 2
        assert "power of 2" in capsys.readouterr().err


def run_simulate(tmp_path, name, extra=()):
    out = tmp_path / f"{name}.csv"
    args = [
        "simulate", "--lc", "8", "--nt", "2", "--nu", "2", "--nc", "2",
        "--snr-db", "0:4:4", "--seed", "3", "--min-errors", "20",
        "--max-symbols", "20000", "--out", str(out),
    ] + list(extra)
    assert main(args) == 0
    return out


class TestSimulateCommand:
    def test_writes_csv_and_sidecar(self, tmp_path, capsys):
        out = run_simulate(tmp_path, "run")
        stdout = capsys.readouterr().out
        assert "snr 0 dB:" in stdout and "snr 4 dB:" in stdout
        assert "wrote" in stdout and "seed=3" in stdout
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "ue,snr_db,ber_sim,ber_bound,ber_private,ber_common,bits,errors,flag"
        assert len(lines) == 5
        sidecar = json.loads(out.with_suffix(".json").read_text())
        assert sidecar["master_seed"] == 3
        assert sidecar["min_bit_errors"] == 20
        assert sidecar["max_symbols"] == 20000
        assert sidecar["snr_grid_db"] == [0.0, 4.0]
        assert sidecar["config"]["traffic_mode"] == "broadcast"

    def test_deterministic_across_runs_and_workers(self, tmp_path, capsys):
        a = run_simulate(tmp_path, "a").read_bytes()
        b = run_simulate(tmp_path, "b").read_bytes()
        c = run_simulate(tmp_path, "c", extra=["--workers", "2"]).read_bytes()
        capsys.readouterr()
        assert a == b == c

    def test_single_sigma_is_shared(self, tmp_path, capsys):
        out = run_simulate(tmp_path, "shared", extra=["--sigma", "2.0"])
        capsys.readouterr()
        sidecar = json.loads(out.with_suffix(".json").read_text())
        assert sidecar["config"]["fading_variances"] == [2.0, 2.0]

    def test_sigma_count_mismatch_exits(self, tmp_path):
        with pytest.raises(SystemExit):
            main([
                "simulate", "--lc", "8", "--nt", "2", "--nu", "2", "--nc", "2",
                "--sigma", "1,2,3", "--snr-db", "0",
                "--out", str(tmp_path / "x.csv"),
            ])

    def test_unicast_mode_recorded(self, tmp_path, capsys):
        out = run_simulate(tmp_path, "uni", extra=["--mode", "unicast"])
        capsys.readouterr()
        sidecar = json.loads(out.with_suffix(".json").read_text())
        assert sidecar["config"]["traffic_mode"] == "unicast"

    def test_out_flag_required(self, capsys):
        with pytest.raises(SystemExit):
            main(["simulate", "--lc", "8", "--nt", "2", "--nu", "2", "--nc", "2",
                  "--snr-db", "0"])
        capsys.readouterr()


class TestEntryPoint:
    def test_module_help_runs(self):
        proc = subprocess.run(
            [sys.executable, "-m", "grcim.cli", "--help"],
            capture_output=True, text=True, timeout=60,
        )
        assert proc.returncode == 0
        for word in ("codebook", "analyze", "simulate"):
            assert word in proc.stdout

    def test_console_script_help_runs(self):
        proc = subprocess.run(
            ["grcim", "--help"], capture_output=True, text=True, timeout=60,
        )
        assert proc.returncode == 0
        assert "usage: grcim" in proc.stdout
