"""Store routing-table style entries with don't-care bits and search them,
functionally and with matchline timing.
"""

from tcamsim import Technology, calibrate, from_symbols, search_timed, ternary_word

cal = calibrate()
cfg = cal.array_config(Technology.NEM_3T2N, rows=6, cols=12)

entries = [
    "101100XXXXXX",  # /6 prefix
    "1011000110XX",  # /10 prefix
    "10110001101X",  # /11 prefix
    "0110XXXXXXXX",  # /4 prefix
    "011011110000",  # exact
    "XXXXXXXXXXXX",  # catch-all
]
arr = from_symbols(cfg, entries)
print("stored entries:")
for i, e in enumerate(entries):
    print(f"  row {i}: {e}")

for key in ("101100011010", "011011110000", "110000000000"):
    arr, matches, settle, report = search_timed(arr, ternary_word(key))
    hits = [i for i, m in enumerate(matches) if m]
    print(f"\nkey {key}")
    print(f"  matching rows: {hits if hits else 'none'}")
    for i, t in enumerate(settle):
        desc = "holds vdd (match)" if t is None else f"settles low in {t * 1e12:.1f} ps"
        print(f"    row {i}: {desc}")
    print(f"  search energy {report.energy * 1e15:.1f} fJ, "
          f"worst-case latency {report.latency * 1e12:.1f} ps")
