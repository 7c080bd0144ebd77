"""Calibrate the lumped model and reproduce the full benchmark table."""

from tcamsim import calibrate, run_all_benches

cal = calibrate()
print("calibration residuals (relative error against target):")
for name, value in sorted(cal.residuals.items()):
    print(f"  {name:28s} {value:+.3e}")
print(f"fitted gate leakage: {cal.i_leak * 1e12:.4f} pA")
print(f"RRAM cells rewritten per benchmark row write: {cal.rram_flipped_cells}")

report = run_all_benches(cal)
print(f"\n{'metric':30s} {'technology':12s} {'value':>12s} "
      f"{'ratio':>9s} {'target':>10s} {'ok':>4s}")
for row in report.rows:
    ratio = f"{row.ratio_vs_3t2n:.4g}" if row.ratio_vs_3t2n is not None else "-"
    target = f"{row.paper_target:.4g}" if row.paper_target is not None else "-"
    print(f"{row.metric:30s} {row.technology:12s} {row.absolute_value:12.4g} "
          f"{ratio:>9s} {target:>10s} {'yes' if row.passed else 'NO':>4s}")
print(f"\nall rows pass: {report.all_pass}")
