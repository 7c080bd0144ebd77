"""End-to-end CLI tests driving the argparse entry point directly."""

import csv
import io
import json

import pytest

from tcamsim.cli import calibration_from_toml, main
from tcamsim.units import UnitError, format_quantity, parse_quantity


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestUnits:
    def test_common_quantities(self):
        assert parse_quantity("20aF", "F") == pytest.approx(20e-18)
        assert parse_quantity("2ns", "s") == pytest.approx(2e-9)
        assert parse_quantity("500mV", "V") == pytest.approx(0.5)
        assert parse_quantity("1kohm", "ohm") == pytest.approx(1e3)
        assert parse_quantity("26.5us", "s") == pytest.approx(26.5e-6)
        assert parse_quantity("19.6nW", "W") == pytest.approx(19.6e-9)

    def test_bare_numbers_rejected(self):
        with pytest.raises(UnitError):
            parse_quantity("20", "F")

    def test_wrong_dimension_rejected(self):
        with pytest.raises(UnitError):
            parse_quantity("20aF", "s")

    def test_format_round_trip(self):
        for value, unit in ((6.566e-13, "A"), (0.35e-12, "J"), (2e-9, "s"),
                            (57885.9, "ohm"), (1.0, "V")):
            assert parse_quantity(format_quantity(value, unit), unit) == \
                pytest.approx(value, rel=1e-12)


class TestCalibrateCommand:
    def test_writes_toml_with_fitted_leakage(self, tmp_path, capsys):
        code, out, _ = run(capsys, "calibrate", "--out", str(tmp_path))
        assert code == 0
        text = (tmp_path / "calibration.toml").read_text()
        cal = calibration_from_toml(text)
        assert cal.i_leak == pytest.approx(0.657e-12, rel=0.01)
        assert "residuals" in out

    def test_missing_targets_file_names_the_path(self, tmp_path, capsys):
        code, _, err = run(capsys, "calibrate", "--targets",
                           str(tmp_path / "absent.toml"), "--out", str(tmp_path))
        assert code == 2
        assert "absent.toml" in err

    def test_custom_targets_fixed_point_ratio(self, tmp_path, capsys):
        # SRAM write energy set equal to the relay array's: ratio 1.0
        # propagates into the report.
        targets = tmp_path / "custom.toml"
        targets.write_text(
            '[write_energy]\nsram16t = "0.35pJ"\n'
            "[write_energy_ratio]\nsram16t = 1.0\n")
        code, out, _ = run(capsys, "bench", "--targets", str(targets),
                           "--out", str(tmp_path))
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        ratio_row = next(r for r in rows if r["metric"] == "write_energy_ratio"
                         and r["technology"] == "sram16t")
        assert float(ratio_row["ratio_vs_3t2n"]) == pytest.approx(1.0, rel=1e-9)


class TestBenchCommand:
    def test_default_run_passes_and_writes_reports(self, tmp_path, capsys):
        code, out, _ = run(capsys, "bench", "--out", str(tmp_path))
        assert code == 0
        assert (tmp_path / "bench_report.csv").exists()
        assert (tmp_path / "bench_report.json").exists()
        rows = list(csv.DictReader(io.StringIO(out)))
        assert all(r["pass"] == "pass" for r in rows)

    def test_tech_filter(self, tmp_path, capsys):
        code, out, _ = run(capsys, "bench", "--tech", "sram16t", "--out", str(tmp_path))
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rows
        assert {r["technology"] for r in rows} <= {"sram16t", "all"}

    def test_json_format_matches_csv_values(self, tmp_path, capsys):
        code, csv_out, _ = run(capsys, "bench", "--seed", "5", "--format", "csv",
                               "--out", str(tmp_path / "a"))
        assert code == 0
        code, json_out, _ = run(capsys, "bench", "--seed", "5", "--format", "json",
                                "--out", str(tmp_path / "b"))
        assert code == 0
        csv_rows = list(csv.DictReader(io.StringIO(csv_out)))
        json_rows = json.loads(json_out)["rows"]
        assert len(csv_rows) == len(json_rows)
        for c, j in zip(csv_rows, json_rows):
            assert float(c["absolute_value"]) == j["absolute_value"]

    def test_deterministic_output_files(self, tmp_path, capsys):
        run(capsys, "bench", "--seed", "9", "--out", str(tmp_path / "x"))
        run(capsys, "bench", "--seed", "9", "--out", str(tmp_path / "y"))
        assert (tmp_path / "x/bench_report.csv").read_bytes() == \
            (tmp_path / "y/bench_report.csv").read_bytes()
        assert (tmp_path / "x/bench_report.json").read_bytes() == \
            (tmp_path / "y/bench_report.json").read_bytes()

    def test_failed_target_exits_one_and_lists_failures(self, tmp_path, capsys):
        targets = tmp_path / "bad.toml"
        # Claim the relay array writes for free of charge: unreachable.
        targets.write_text('[write_energy]\nnem3t2n = "0.01pJ"\n')
        code, _, err = run(capsys, "bench", "--targets", str(targets),
                           "--out", str(tmp_path))
        assert code == 1
        assert "FAIL" in err

    def test_bench_from_calibration_file(self, tmp_path, capsys):
        run(capsys, "calibrate", "--out", str(tmp_path))
        code, out, _ = run(capsys, "bench", "--calibration",
                           str(tmp_path / "calibration.toml"), "--out", str(tmp_path))
        assert code == 0


class TestTraceCommand:
    def test_no_refresh_long_trace_loses_data(self, tmp_path, capsys):
        trace = tmp_path / "t.trace"
        lines = ["0 WRITE 0 " + "10" * 32]
        lines += [f"{t} SEARCH {'X' * 64}" for t in range(10000, 100001, 10000)]
        trace.write_text("\n".join(lines) + "\n")
        code, out, _ = run(capsys, "trace", "--trace", str(trace),
                           "--policy", "none", "--out", str(tmp_path))
        assert code == 0
        assert "data_loss_events=0" not in out

    def test_one_shot_stalls_no_more_than_row_by_row(self, tmp_path, capsys):
        trace = tmp_path / "t.trace"
        period_ns = 9000
        lines = [f"{k * period_ns} SEARCH {'X' * 64}" for k in range(1, 4)]
        trace.write_text("\n".join(lines) + "\n")
        stalls = {}
        for policy in ("one-shot", "row-by-row"):
            code, out, _ = run(capsys, "trace", "--trace", str(trace),
                               "--policy", policy, "--period", "9us",
                               "--out", str(tmp_path))
            assert code == 0
            stalls[policy] = int(next(l for l in out.splitlines()
                                      if l.startswith("stalled_requests")).split("=")[1])
        assert stalls["one-shot"] <= stalls["row-by-row"]

    def test_empty_trace_is_fine(self, tmp_path, capsys):
        trace = tmp_path / "empty.trace"
        trace.write_text("")
        code, out, _ = run(capsys, "trace", "--trace", str(trace), "--out", str(tmp_path))
        assert code == 0
        assert "requests=0" in out

    def test_malformed_line_exits_two_with_line_number(self, tmp_path, capsys):
        trace = tmp_path / "bad.trace"
        trace.write_text("0 SEARCH 1010\nnot a line\n")
        code, _, err = run(capsys, "trace", "--trace", str(trace), "--out", str(tmp_path))
        assert code == 2
        assert "line 2" in err

    def test_json_output(self, tmp_path, capsys):
        trace = tmp_path / "t.trace"
        trace.write_text("0 SEARCH " + "X" * 64 + "\n")
        code, out, _ = run(capsys, "trace", "--trace", str(trace),
                           "--format", "json", "--out", str(tmp_path))
        assert code == 0
        assert json.loads(out)["requests"] == 1


class TestSearchCommand:
    def test_all_dont_care_contents_match_everything(self, tmp_path, capsys):
        contents = tmp_path / "cam.txt"
        contents.write_text("\n".join(["X" * 8] * 5) + "\n")
        code, out, _ = run(capsys, "search", "--contents", str(contents), "10110100")
        assert code == 0
        assert out.split() == ["0", "1", "2", "3", "4"]

    def test_all_dont_care_key_matches_everything(self, tmp_path, capsys):
        contents = tmp_path / "cam.txt"
        contents.write_text("10110100\n01001011\n")
        code, out, _ = run(capsys, "search", "--contents", str(contents), "XXXXXXXX")
        assert code == 0
        assert out.split() == ["0", "1"]

    def test_single_bit_mismatch_with_timing(self, tmp_path, capsys):
        contents = tmp_path / "cam.txt"
        contents.write_text("10110100\n")
        code, out, _ = run(capsys, "search", "--contents", str(contents),
                           "--timed", "10110101")
        assert code == 0
        lines = out.splitlines()
        assert not any(l == "0" for l in lines)  # no match printed
        assert any(l.startswith("worst_case_settle_s=") for l in lines)
        assert any(l.startswith("search_energy_J=") for l in lines)

    def test_key_length_mismatch_exits_two(self, tmp_path, capsys):
        contents = tmp_path / "cam.txt"
        contents.write_text("10110100\n")
        code, _, err = run(capsys, "search", "--contents", str(contents), "101")
        assert code == 2

    def test_export_import_round_trip_same_results(self, tmp_path, capsys):
        contents = tmp_path / "cam.txt"
        contents.write_text("10X10X\n010101\nXXXXXX\n")
        code, out1, _ = run(capsys, "search", "--contents", str(contents), "100101")
        # Rewriting the same contents file must reproduce identical output.
        contents.write_text(contents.read_text())
        code, out2, _ = run(capsys, "search", "--contents", str(contents), "100101")
        assert out1 == out2

    def test_missing_contents_file(self, tmp_path, capsys):
        code, _, err = run(capsys, "search", "--contents",
                           str(tmp_path / "nope.txt"), "101")
        assert code == 2
        assert "nope.txt" in err
