"""Command-line interface.

Subcommands: calibrate, bench, trace, search. Physical quantities in config
and calibration files carry explicit unit suffixes. Exit codes: 0 all pass,
1 benchmark target failure, 2 input or configuration error. Set TCAMSIM_LOG
to DEBUG/INFO/WARNING for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .analog import DischargePath, RcStage
from .array import LineParasitics, from_symbols, search_timed, ternary_word
from .bench import (
    Calibration,
    CalibrationError,
    CalibrationTargets,
    TechCalibration,
    calibrate,
    run_all_benches,
)
from .cells import Technology, fefet_2f, nem_3t2n, rram_2t2r, sram_16t
from .devices import FefetParams, MosfetParams, RelayParams, RramParams
from .refresh import (
    NoRefresh,
    OneShot,
    PolicyError,
    RowByRow,
    TraceParseError,
    parse_trace,
    simulate_workload,
)
from .units import UnitError, format_quantity, parse_quantity

log = logging.getLogger("tcamsim")

EXIT_OK = 0
EXIT_BENCH_FAIL = 1
EXIT_CONFIG = 2


class ConfigError(Exception):
    pass


def _read_toml(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"file not found: {path}")
    try:
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _tech_key(name: str) -> Technology:
    try:
        return Technology(name.lower())
    except ValueError:
        valid = ", ".join(t.value for t in Technology)
        raise ConfigError(f"unknown technology {name!r}; expected one of {valid}") from None


def _targets_from_toml(data: dict) -> CalibrationTargets:
    tgt = CalibrationTargets()

    def fill(table_name: str, table: dict, unit: str | None) -> None:
        src = data.get(table_name, {})
        for name, value in src.items():
            kind = _tech_key(name)
            table[kind] = parse_quantity(value, unit) if unit else float(value)

    fill("write_energy", tgt.write_energy, "J")
    fill("write_latency", tgt.write_latency, "s")
    fill("write_energy_ratio", tgt.write_energy_ratio, None)
    fill("search_latency_ratio", tgt.search_latency_ratio, None)
    fill("search_energy_ratio", tgt.search_energy_ratio, None)
    fill("edp_ratio", tgt.edp_ratio, None)
    for name, unit in (("osr_energy", "J"), ("retention", "s"),
                       ("refresh_power", "W"), ("vdd", "V"), ("v_r", "V")):
        if name in data:
            setattr(tgt, name, parse_quantity(data[name], unit))
    for name in ("rows", "cols"):
        if name in data:
            setattr(tgt, name, int(data[name]))
    return tgt


_DEVICE_UNITS = {
    "v_pi": "V", "v_po": "V", "c_on": "F", "c_off": "F", "r_on": "ohm",
    "tau_mech": "s", "i_leak": "A", "r_eff": "ohm", "c_gate": "F",
    "r_off": "ohm", "v_set": "V", "v_reset": "V", "t_write": "s", "v_write": "V",
}


def _device_fields(obj) -> dict[str, str]:
    return {name: format_quantity(getattr(obj, name), _DEVICE_UNITS[name])
            for name in obj.__dataclass_fields__}


def calibration_to_toml(cal: Calibration) -> str:
    """Render solved parameters as a unit-suffixed TOML document."""
    lines = ["# tcamsim calibrated parameters", ""]
    lines.append(f'i_leak = "{format_quantity(cal.i_leak, "A")}"')
    lines.append(f"rram_flipped_cells = {cal.rram_flipped_cells}")
    lines.append(f"rows = {cal.targets.rows}")
    lines.append(f"cols = {cal.targets.cols}")
    lines.append(f'vdd = "{format_quantity(cal.targets.vdd, "V")}"')
    lines.append(f'v_r = "{format_quantity(cal.targets.v_r, "V")}"')
    lines.append("")
    lines.append("[residuals]")
    for name, value in sorted(cal.residuals.items()):
        lines.append(f"{name} = {value!r}")
    for kind, tc in cal.per_tech.items():
        lines.append("")
        lines.append(f"[{kind.value}]")
        lines.append(f'write_supply = "{format_quantity(tc.write_supply, "V")}"')
        lines.append(f'write_driver_r = "{format_quantity(tc.write_driver_r, "ohm")}"')
        stages = ", ".join(
            f'["{format_quantity(st.r, "ohm")}", "{format_quantity(st.c, "F")}"]'
            for st in tc.pulldown.stages)
        lines.append(f"pulldown_stages = [{stages}]")
        lines.append(f"[{kind.value}.parasitics]")
        for name in ("c_ml_per_cell", "c_bl_per_cell", "c_sl_per_cell", "c_wl_per_cell"):
            lines.append(f'{name} = "{format_quantity(getattr(tc.parasitics, name), "F")}"')
        lines.append(f"[{kind.value}.device]")
        for name, value in _device_fields(tc.tech.device_params).items():
            lines.append(f'{name} = "{value}"')
    return "\n".join(lines) + "\n"


def calibration_from_toml(text: str) -> Calibration:
    data = tomllib.loads(text)
    targets = CalibrationTargets()
    targets.rows = int(data["rows"])
    targets.cols = int(data["cols"])
    targets.vdd = parse_quantity(data["vdd"], "V")
    targets.v_r = parse_quantity(data["v_r"], "V")

    def qty(table: dict, name: str, unit: str) -> float:
        return parse_quantity(table[name], unit)

    per_tech: dict[Technology, TechCalibration] = {}
    mosfet = None
    for kind in Technology:
        section = data[kind.value]
        dev = section["device"]
        if kind is Technology.NEM_3T2N:
            params = RelayParams(**{k: qty(dev, k, _DEVICE_UNITS[k]) for k in dev})
            tech = nem_3t2n(params)
        elif kind is Technology.SRAM_16T:
            mosfet = MosfetParams(**{k: qty(dev, k, _DEVICE_UNITS[k]) for k in dev})
            tech = sram_16t(mosfet)
        elif kind is Technology.RRAM_2T2R:
            tech = rram_2t2r(RramParams(**{k: qty(dev, k, _DEVICE_UNITS[k]) for k in dev}))
        else:
            tech = fefet_2f(FefetParams(**{k: qty(dev, k, _DEVICE_UNITS[k]) for k in dev}))
        par = section["parasitics"]
        stages = tuple(RcStage(parse_quantity(r, "ohm"), parse_quantity(c, "F"))
                       for r, c in section["pulldown_stages"])
        per_tech[kind] = TechCalibration(
            tech=tech,
            parasitics=LineParasitics(**{k: qty(par, k, "F") for k in par}),
            write_supply=qty(section, "write_supply", "V"),
            pulldown=DischargePath(stages),
            write_driver_r=qty(section, "write_driver_r", "ohm"),
        )
    return Calibration(
        targets=targets,
        per_tech=per_tech,
        i_leak=parse_quantity(data["i_leak"], "A"),
        rram_flipped_cells=int(data["rram_flipped_cells"]),
        mosfet=mosfet or per_tech[Technology.SRAM_16T].tech.device_params,
        residuals={k: float(v) for k, v in data.get("residuals", {}).items()},
    )


def _calibration_for(args) -> Calibration:
    if getattr(args, "calibration", None):
        path = Path(args.calibration)
        if not path.exists():
            raise ConfigError(f"file not found: {args.calibration}")
        return calibration_from_toml(path.read_text())
    targets = None
    if getattr(args, "targets", None):
        targets = _targets_from_toml(_read_toml(args.targets))
    return calibrate(targets)


def cmd_calibrate(args) -> int:
    cal = _calibration_for(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "calibration.toml"
    out_path.write_text(calibration_to_toml(cal))
    print(f"wrote {out_path}")
    print("solve residuals (relative error vs target):")
    for name, value in sorted(cal.residuals.items()):
        print(f"  {name}: {value:+.3e}")
    return EXIT_OK


def cmd_bench(args) -> int:
    cal = _calibration_for(args)
    report = run_all_benches(cal, seed=args.seed)
    if args.tech:
        report = report.filtered(_tech_key(args.tech).value)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "bench_report.csv").write_text(report.to_csv())
    (out_dir / "bench_report.json").write_text(report.to_json())
    sys.stdout.write(report.to_json() if args.format == "json" else report.to_csv())
    if not report.all_pass:
        for row in report.failures():
            print(f"FAIL {row.metric} [{row.technology}]: value {row.absolute_value!r} "
                  f"target {row.paper_target!r} tolerance {row.tolerance!r}",
                  file=sys.stderr)
        return EXIT_BENCH_FAIL
    return EXIT_OK


def _policy_from(args, cal: Calibration):
    period = parse_quantity(args.period, "s") if args.period else cal.targets.retention
    v_r = parse_quantity(args.v_r, "V") if args.v_r else cal.targets.v_r
    name = args.policy
    if name == "one-shot":
        return OneShot(v_r=v_r, period=period)
    if name == "row-by-row":
        return RowByRow(period=period)
    if name == "none":
        return NoRefresh()
    raise ConfigError(f"unknown refresh policy {name!r}")


def cmd_trace(args) -> int:
    cal = _calibration_for(args)
    trace_path = Path(args.trace)
    if not trace_path.exists():
        raise ConfigError(f"file not found: {args.trace}")
    trace = parse_trace(trace_path.read_text())
    cfg = cal.array_config(Technology.NEM_3T2N)
    if args.contents:
        text = Path(args.contents).read_text()
        rows = [line.strip() for line in text.splitlines() if line.strip()]
        cfg = cal.array_config(Technology.NEM_3T2N, rows=len(rows), cols=len(rows[0]))
        arr = from_symbols(cfg, rows)
    else:
        arr = from_symbols(cfg, ["X" * cfg.cols] * cfg.rows)
    policy = _policy_from(args, cal)
    stats = simulate_workload(arr, trace, policy)
    fields = {
        "requests": len(trace.requests),
        "refresh_ops": stats.refresh_ops,
        "refresh_energy_J": stats.refresh_energy,
        "average_power_W": stats.average_power,
        "stalled_requests": stats.stalled_requests,
        "total_stall_time_s": stats.total_stall_time,
        "data_loss_events": stats.data_loss_events,
    }
    if args.format == "json":
        print(json.dumps(fields, indent=2))
    else:
        for name, value in fields.items():
            print(f"{name}={value!r}")
    return EXIT_OK


def cmd_search(args) -> int:
    contents_path = Path(args.contents)
    if not contents_path.exists():
        raise ConfigError(f"file not found: {args.contents}")
    rows = [line.strip() for line in contents_path.read_text().splitlines() if line.strip()]
    if not rows:
        raise ConfigError(f"{args.contents}: empty contents file")
    cal = _calibration_for(args)
    kind = _tech_key(args.tech) if args.tech else Technology.NEM_3T2N
    cfg = cal.array_config(kind, rows=len(rows), cols=len(rows[0]))
    arr = from_symbols(cfg, rows)
    try:
        key = ternary_word(args.key)
        arr, matches, settle, report = search_timed(arr, key)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    for idx, hit in enumerate(matches):
        if hit:
            print(idx)
    if args.timed:
        print(f"worst_case_settle_s={report.latency!r}")
        print(f"search_energy_J={report.energy!r}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcamsim",
        description="Dynamic NEM-relay TCAM simulator and benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--targets", help="TOML file of calibration targets")
        p.add_argument("--calibration", help="previously written calibration.toml")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="random seed")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p_cal = sub.add_parser("calibrate", help="solve parameters from targets")
    common(p_cal)
    p_cal.set_defaults(func=cmd_calibrate)

    p_bench = sub.add_parser("bench", help="run write/search/refresh benchmarks")
    common(p_bench)
    p_bench.add_argument("--tech", help="restrict report to one technology")
    p_bench.set_defaults(func=cmd_bench)

    p_trace = sub.add_parser("trace", help="replay a workload trace under a refresh policy")
    common(p_trace)
    p_trace.add_argument("--trace", required=True, help="trace file path")
    p_trace.add_argument("--contents", help="initial array contents file")
    p_trace.add_argument("--policy", default="one-shot",
                         choices=("one-shot", "row-by-row", "none"))
    p_trace.add_argument("--period", help="refresh period, e.g. '9us'")
    p_trace.add_argument("--v-r", dest="v_r", help="refresh voltage, e.g. '500mV'")
    p_trace.set_defaults(func=cmd_trace)

    p_search = sub.add_parser("search", help="search stored contents for a key")
    common(p_search)
    p_search.add_argument("--contents", required=True, help="array contents file")
    p_search.add_argument("--tech", help="cell technology (default nem3t2n)")
    p_search.add_argument("--timed", action="store_true",
                          help="report settle time and energy")
    p_search.add_argument("key", help="ternary search key over {0,1,X}")
    p_search.set_defaults(func=cmd_search)
    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("TCAMSIM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CalibrationError, PolicyError, UnitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TraceParseError as exc:
        print(f"error: trace {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
