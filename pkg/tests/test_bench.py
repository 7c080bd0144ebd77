"""Calibration solves and benchmark round-trip tests."""

import json

import pytest

from tcamsim import (
    CalibrationError,
    CalibrationTargets,
    Technology,
    calibrate,
    run_all_benches,
    run_refresh_bench,
    run_search_bench,
    run_write_bench,
)

# Hand-derived solves, independent of the calibration code:
#   i_leak = c_on (vdd - v_po) / retention = 20aF * 0.87 / 26.5us
#   3T2N switched capacitance per row = 0.35pJ / (1V)^2
#   FeFET switched capacitance per row ~= 4.7pJ / (4V)^2
I_LEAK_ORACLE = 6.566037735849056e-13
C_ROW_3T2N = 0.35e-12
C_ROW_FEFET = 4.7e-12 / 16


class TestCalibrate:
    def test_leakage_current_solve(self, cal):
        assert cal.i_leak == pytest.approx(0.657e-12, rel=0.01)
        assert cal.i_leak == pytest.approx(I_LEAK_ORACLE, rel=1e-12)

    def test_total_switched_capacitance_per_row(self, cal):
        tgt = cal.targets
        par = cal.per_tech[Technology.NEM_3T2N].parasitics
        c_total = tgt.cols * par.c_wl_per_cell + tgt.cols * tgt.rows * par.c_bl_per_cell
        assert c_total == pytest.approx(C_ROW_3T2N, rel=1e-9)
        par_fe = cal.per_tech[Technology.FEFET_2F].parasitics
        c_fe = tgt.cols * tgt.rows * par_fe.c_bl_per_cell
        assert c_fe == pytest.approx(C_ROW_FEFET, rel=0.01)

    def test_deterministic_and_order_independent(self):
        a, b = calibrate(), calibrate()
        for kind in Technology:
            assert a.per_tech[kind].parasitics == b.per_tech[kind].parasitics
            assert a.per_tech[kind].pulldown == b.per_tech[kind].pulldown
        assert a.i_leak == b.i_leak
        assert a.rram_flipped_cells == b.rram_flipped_cells

    def test_residuals_are_small(self, cal):
        for name, value in cal.residuals.items():
            assert abs(value) < 0.05, name

    def test_inconsistent_edp_targets_rejected(self):
        tgt = CalibrationTargets()
        tgt.edp_ratio[Technology.SRAM_16T] = 20.0  # not 5.50 * 2.31
        with pytest.raises(CalibrationError) as exc:
            calibrate(tgt)
        assert "sram16t" in str(exc.value)

    def test_nonpositive_target_rejected(self):
        tgt = CalibrationTargets()
        tgt.write_energy[Technology.SRAM_16T] = 0.0
        with pytest.raises(CalibrationError) as exc:
            calibrate(tgt)
        assert "sram16t" in str(exc.value)

    def test_rram_flip_count_fits_device_energy_under_target(self, cal):
        e_pair = (1.8 ** 2 + 1.2 ** 2) * 10e-9 / 20e3
        assert cal.rram_flipped_cells == int(46e-12 // e_pair) == 19
        assert cal.rram_flipped_cells * e_pair <= 46e-12


class TestBenchReports:
    def test_full_run_passes_every_row(self, cal):
        report = run_all_benches(cal)
        failures = [(r.metric, r.technology) for r in report.rows if not r.passed]
        assert report.all_pass, failures
        assert len(report.rows) >= 20

    def test_rows_cover_all_published_figures(self, cal):
        report = run_all_benches(cal)
        metrics = {r.metric for r in report.rows}
        assert {"write_energy_per_row", "write_energy_ratio", "write_latency",
                "search_latency_ratio", "search_energy_ratio", "search_edp_ratio",
                "osr_energy", "retention", "refresh_power",
                "refresh_ops_per_period"} <= metrics

    def test_write_bench_reproduces_energies_and_ratios(self, cal):
        report = run_write_bench(cal)
        by_key = {(r.metric, r.technology): r for r in report.rows}
        assert by_key[("write_energy_per_row", "nem3t2n")].absolute_value == \
            pytest.approx(0.35e-12, rel=0.05)
        assert by_key[("write_energy_per_row", "rram2t2r")].absolute_value == \
            pytest.approx(46e-12, rel=0.05)
        assert by_key[("write_energy_ratio", "sram16t")].ratio_vs_3t2n == \
            pytest.approx(2.31, rel=0.05)
        assert by_key[("write_energy_ratio", "rram2t2r")].ratio_vs_3t2n == \
            pytest.approx(131, rel=0.05)
        assert by_key[("write_energy_ratio", "fefet2f")].ratio_vs_3t2n == \
            pytest.approx(13.5, rel=0.05)
        # 46 pJ / 0.35 pJ = 131.4: the published ratio is self-consistent.
        assert 46 / 0.35 == pytest.approx(131.4, rel=1e-3)

    def test_write_latency_ordering(self, cal):
        report = run_write_bench(cal)
        lat = {r.technology: r.absolute_value for r in report.rows
               if r.metric == "write_latency"}
        assert lat["sram16t"] < lat["nem3t2n"] < lat["rram2t2r"] <= lat["fefet2f"]

    def test_search_bench_edp_identity(self, cal):
        report = run_search_bench(cal)
        rows = {(r.metric, r.technology): r for r in report.rows}
        for kind in ("sram16t", "rram2t2r", "fefet2f"):
            t_ratio = rows[("search_latency_ratio", kind)].ratio_vs_3t2n
            e_ratio = rows[("search_energy_ratio", kind)].ratio_vs_3t2n
            edp_ratio = rows[("search_edp_ratio", kind)].ratio_vs_3t2n
            assert abs(edp_ratio / (t_ratio * e_ratio) - 1) < 1e-12

    def test_relay_array_needs_more_search_energy_than_fefet(self, cal):
        report = run_search_bench(cal)
        rows = {(r.metric, r.technology): r for r in report.rows}
        e_nem = rows[("search_energy", "nem3t2n")].absolute_value
        assert rows[("search_energy_ratio", "fefet2f")].absolute_value < e_nem
        assert rows[("search_energy_ratio", "rram2t2r")].absolute_value < e_nem

    def test_refresh_bench_rows(self, cal):
        report = run_refresh_bench(cal)
        rows = {(r.metric, r.technology): r for r in report.rows}
        assert rows[("refresh_power", "nem3t2n")].absolute_value == \
            pytest.approx(19.6e-9, rel=0.02)
        assert rows[("refresh_ops_per_period", "one-shot")].absolute_value == 1
        assert rows[("refresh_ops_per_period", "row-by-row")].absolute_value == 64

    def test_same_seed_reproduces_byte_identical_output(self, cal):
        a = run_all_benches(cal, seed=7)
        b = run_all_benches(cal, seed=7)
        assert a.to_csv() == b.to_csv()
        assert a.to_json() == b.to_json()

    def test_csv_schema(self, cal):
        csv_text = run_write_bench(cal).to_csv()
        header = csv_text.splitlines()[0]
        assert header == ("metric,technology,absolute_value,unit,"
                          "ratio_vs_3t2n,paper_target,tolerance,pass")

    def test_json_matches_csv_values(self, cal):
        report = run_all_benches(cal, seed=3)
        data = json.loads(report.to_json())
        assert data["all_pass"] is True
        assert len(data["rows"]) == len(report.rows)
        csv_lines = report.to_csv().splitlines()[1:]
        for row, line in zip(data["rows"], csv_lines):
            assert line.startswith(f"{row['metric']},{row['technology']}")
            assert repr(row["absolute_value"]) in line

    def test_ratios_are_unit_scale_invariant(self, cal):
        # Expressing a row in pJ instead of J is a pure display change: every
        # ratio column is computed from raw SI values.
        report = run_search_bench(cal)
        for row in report.rows:
            if row.ratio_vs_3t2n is not None and row.metric == "search_energy_ratio":
                scaled = (row.absolute_value * 1e12)
                base = next(r.absolute_value for r in report.rows
                            if r.metric == "search_energy") * 1e12
                assert scaled / base == pytest.approx(row.ratio_vs_3t2n, rel=1e-12)
