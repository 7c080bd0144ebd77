"""The rows x cols TCAM array.

Ternary storage, line-parasitic aggregation, and the functional and timed
write/search/precharge operations. Arrays are values: every operation takes
an array and returns a new one, so distinct arrays can be simulated in
parallel without coordination.

Cell states are held as numpy conduction masks (one per complementary device)
plus, for the relay technology, the floating gate voltages. Contents
import/export as text, one row per line, symbols in {0, 1, X}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analog import (
    DischargePath,
    EnergyLatencyReport,
    RcStage,
    line_switch_energy,
    matchline_settle_time,
    rc_transition_time,
)
from .cells import (
    CellState,
    CellTechnology,
    ConfigurationError,
    CorruptedCellError,
    FefetCellState,
    NemCellState,
    RramCellState,
    SramCellState,
    Technology,
    TernaryValue,
    parse_ternary,
)
from .devices import (
    FefetPolarization,
    FefetState,
    MosfetParams,
    Position,
    RelayState,
    RramLevel,
    RramState,
    default_mosfet_params,
)

TernaryWord = tuple[TernaryValue, ...]


def ternary_word(text: str) -> TernaryWord:
    """Parse a string over {0, 1, X} into a ternary word."""
    return tuple(parse_ternary(ch) for ch in text.strip())


def word_string(word: TernaryWord) -> str:
    return "".join(sym.symbol for sym in word)


@dataclass(frozen=True)
class LineParasitics:
    """Per-cell line capacitances, already scaled by the cell footprint."""

    c_ml_per_cell: float  # F
    c_bl_per_cell: float
    c_sl_per_cell: float
    c_wl_per_cell: float

    def __post_init__(self) -> None:
        for name in ("c_ml_per_cell", "c_bl_per_cell", "c_sl_per_cell", "c_wl_per_cell"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def footprint_scaled_parasitics(c_per_footprint_unit: float,
                                footprint_units: float) -> LineParasitics:
    """Uniform line density scaled by relative cell area."""
    c = c_per_footprint_unit * footprint_units
    return LineParasitics(c, c, c, c)


def default_pulldown_path(tech: CellTechnology, parasitics: LineParasitics, cols: int,
                          mosfet: MosfetParams | None = None,
                          c_ts_gate_per_path: float | None = None) -> DischargePath:
    """Discharge path between matchline and ground for one mismatching cell.

    The 3T2N path has two stages: the closed relay drives the sense
    transistor gate, then the sense transistor discharges the matchline.
    The other technologies pull the matchline down in a single stage. The
    final-stage capacitance is the full matchline load.
    """
    mosfet = mosfet or default_mosfet_params()
    c_ml_total = max(cols * parasitics.c_ml_per_cell, 1e-21)
    if tech.kind is Technology.NEM_3T2N:
        c_ts = c_ts_gate_per_path if c_ts_gate_per_path is not None else mosfet.c_gate
        return DischargePath((
            RcStage(tech.device_params.r_on, c_ts),
            RcStage(mosfet.r_eff, c_ml_total),
        ))
    if tech.kind is Technology.SRAM_16T:
        # Two series NMOS between matchline and ground.
        return DischargePath((RcStage(2 * mosfet.r_eff, c_ml_total),))
    if tech.kind is Technology.RRAM_2T2R:
        return DischargePath((RcStage(tech.device_params.r_on + mosfet.r_eff, c_ml_total),))
    return DischargePath((RcStage(mosfet.r_eff, c_ml_total),))


@dataclass(frozen=True)
class ArrayConfig:
    rows: int
    cols: int
    vdd: float  # V, search/precharge supply
    tech: CellTechnology
    parasitics: LineParasitics
    write_supply: float  # V, bitline swing during writes
    v_sense: float | None = None  # defaults to vdd / 2
    pulldown: DischargePath | None = None
    write_driver_r: float = 50e3  # ohm, bitline write driver
    sense_overhead: float = 0.0  # J per search, peripheral allowance

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"array dimensions must be at least 1x1, got "
                             f"{self.rows}x{self.cols}")
        if self.vdd <= 0 or self.write_supply <= 0:
            raise ValueError("supplies must be positive")
        v_sense = self.vdd / 2 if self.v_sense is None else self.v_sense
        if not 0 < v_sense < self.vdd:
            raise ValueError("v_sense must lie strictly between 0 and vdd")
        object.__setattr__(self, "v_sense", v_sense)
        if self.pulldown is None:
            object.__setattr__(
                self, "pulldown",
                default_pulldown_path(self.tech, self.parasitics, self.cols))
        if self.write_driver_r <= 0:
            raise ValueError("write_driver_r must be positive")

    @property
    def c_ml_line(self) -> float:
        return self.cols * self.parasitics.c_ml_per_cell

    @property
    def c_bl_line(self) -> float:
        return self.rows * self.parasitics.c_bl_per_cell

    @property
    def c_sl_line(self) -> float:
        return self.rows * self.parasitics.c_sl_per_cell

    @property
    def c_wl_line(self) -> float:
        return self.cols * self.parasitics.c_wl_per_cell

    def device_write_time(self) -> float:
        if self.tech.kind is Technology.NEM_3T2N:
            return self.tech.device_params.tau_mech
        if self.tech.kind in (Technology.RRAM_2T2R, Technology.FEFET_2F):
            return self.tech.device_params.t_write
        return 0.0  # SRAM latch: bitline RC dominates


@dataclass(eq=False)
class TcamArray:
    """Array value: configuration plus packed per-cell device state.

    on_a / on_b mark the first / second complementary device of each cell as
    conducting-capable. v_a / v_b are the relay gate voltages (zero for the
    non-relay technologies). sl / sl_bar hold the currently driven searchline
    levels so that repeated identical searches are not double-charged.
    """

    config: ArrayConfig
    on_a: np.ndarray
    on_b: np.ndarray
    v_a: np.ndarray
    v_b: np.ndarray
    ml_voltage: np.ndarray
    sl: np.ndarray
    sl_bar: np.ndarray

    def copy(self) -> "TcamArray":
        return TcamArray(self.config, self.on_a.copy(), self.on_b.copy(),
                         self.v_a.copy(), self.v_b.copy(), self.ml_voltage.copy(),
                         self.sl.copy(), self.sl_bar.copy())


def new_array(config: ArrayConfig) -> TcamArray:
    """Fresh array: every cell stores don't-care, matchlines discharged."""
    shape = (config.rows, config.cols)
    return TcamArray(
        config=config,
        on_a=np.zeros(shape, dtype=bool),
        on_b=np.zeros(shape, dtype=bool),
        v_a=np.zeros(shape),
        v_b=np.zeros(shape),
        ml_voltage=np.zeros(config.rows),
        sl=np.zeros(config.cols),
        sl_bar=np.zeros(config.cols),
    )


def _word_masks(word: TernaryWord) -> tuple[np.ndarray, np.ndarray]:
    a = np.array([sym is TernaryValue.ONE for sym in word], dtype=bool)
    b = np.array([sym is TernaryValue.ZERO for sym in word], dtype=bool)
    return a, b


def from_symbols(config: ArrayConfig, rows: "list[str] | list[TernaryWord]") -> TcamArray:
    """Build an array directly from row contents (bulk write at full supply)."""
    if len(rows) != config.rows:
        raise ValueError(f"expected {config.rows} rows, got {len(rows)}")
    arr = new_array(config)
    for r, row in enumerate(rows):
        word = ternary_word(row) if isinstance(row, str) else row
        if len(word) != config.cols:
            raise ValueError(f"row {r}: expected {config.cols} symbols, got {len(word)}")
        a, b = _word_masks(word)
        arr.on_a[r] = a
        arr.on_b[r] = b
    if config.tech.kind is Technology.NEM_3T2N:
        arr.v_a = np.where(arr.on_a, config.write_supply, 0.0)
        arr.v_b = np.where(arr.on_b, config.write_supply, 0.0)
    return arr


def from_symbol_codes(config: ArrayConfig, codes: np.ndarray) -> TcamArray:
    """Build an array from an integer symbol grid: 0 = zero, 1 = one, 2 = don't-care."""
    codes = np.asarray(codes)
    if codes.shape != (config.rows, config.cols):
        raise ValueError(f"expected a {config.rows}x{config.cols} grid, got {codes.shape}")
    arr = new_array(config)
    arr.on_a = codes == 1
    arr.on_b = codes == 0
    if config.tech.kind is Technology.NEM_3T2N:
        arr.v_a = np.where(arr.on_a, config.write_supply, 0.0)
        arr.v_b = np.where(arr.on_b, config.write_supply, 0.0)
    return arr


def symbol_codes(array: TcamArray) -> np.ndarray:
    """Decode the whole array to an integer symbol grid (inverse of from_symbol_codes)."""
    if np.any(array.on_a & array.on_b):
        raise CorruptedCellError("both complementary devices conduct")
    return np.where(array.on_a, 1, np.where(array.on_b, 0, 2)).astype(np.int8)


def cell_state(array: TcamArray, row: int, col: int) -> CellState:
    """Materialize one cell's state as its technology-tagged value."""
    kind = array.config.tech.kind
    a = bool(array.on_a[row, col])
    b = bool(array.on_b[row, col])
    if kind is Technology.NEM_3T2N:
        return NemCellState(
            n1=RelayState(Position.CLOSED if a else Position.OPEN,
                          v_gb=float(array.v_a[row, col])),
            n2=RelayState(Position.CLOSED if b else Position.OPEN,
                          v_gb=float(array.v_b[row, col])),
        )
    if kind is Technology.SRAM_16T:
        return SramCellState(bit=_pair_value(a, b))
    if kind is Technology.RRAM_2T2R:
        return RramCellState(r1=RramState(RramLevel.LOW if a else RramLevel.HIGH),
                             r2=RramState(RramLevel.LOW if b else RramLevel.HIGH))
    return FefetCellState(
        f1=FefetState(FefetPolarization.LOW_VT if a else FefetPolarization.HIGH_VT),
        f2=FefetState(FefetPolarization.LOW_VT if b else FefetPolarization.HIGH_VT),
    )


def _pair_value(a: bool, b: bool) -> TernaryValue:
    if a and b:
        raise CorruptedCellError("both complementary devices conduct")
    if a:
        return TernaryValue.ONE
    if b:
        return TernaryValue.ZERO
    return TernaryValue.DONT_CARE


def row_word(array: TcamArray, row: int) -> TernaryWord:
    return tuple(_pair_value(bool(a), bool(b))
                 for a, b in zip(array.on_a[row], array.on_b[row]))


def write_row(array: TcamArray, row: int, word: TernaryWord) -> tuple[TcamArray, EnergyLatencyReport]:
    """Write one row and report the energy and latency of the operation.

    Energy is the wordline charge, one bitline swing at the write supply per
    definite column, and the resistive programming energy of every RRAM
    device that actually changes level. Latency is the slower of the bitline
    charging time and the device switching time; wordline rise is part of
    the addressing/decoding overhead shared by all technologies and is
    excluded by convention.
    """
    cfg = array.config
    if not 0 <= row < cfg.rows:
        raise IndexError(f"row {row} out of range for {cfg.rows}-row array")
    if len(word) != cfg.cols:
        raise ValueError(f"word length {len(word)} != array cols {cfg.cols}")
    _check_write_supply(cfg)

    new = array.copy()
    a, b = _word_masks(word)
    old_a, old_b = array.on_a[row], array.on_b[row]

    device_energy = 0.0
    if cfg.tech.kind is Technology.RRAM_2T2R:
        p = cfg.tech.device_params
        e_set = p.v_set ** 2 * p.t_write / p.r_on
        e_reset = p.v_reset ** 2 * p.t_write / p.r_on
        n_set = int(np.count_nonzero(~old_a & a)) + int(np.count_nonzero(~old_b & b))
        n_reset = int(np.count_nonzero(old_a & ~a)) + int(np.count_nonzero(old_b & ~b))
        device_energy = n_set * e_set + n_reset * e_reset

    switched = int(np.count_nonzero(old_a != a)) + int(np.count_nonzero(old_b != b))

    new.on_a[row] = a
    new.on_b[row] = b
    if cfg.tech.kind is Technology.NEM_3T2N:
        new.v_a[row] = np.where(a, cfg.write_supply, 0.0)
        new.v_b[row] = np.where(b, cfg.write_supply, 0.0)

    n_definite = int(np.count_nonzero(a | b))
    e_wl = line_switch_energy(cfg.c_wl_line, cfg.vdd)
    e_bl = n_definite * line_switch_energy(cfg.c_bl_line, cfg.write_supply)

    t_bl = 0.0
    if n_definite and cfg.c_bl_line > 0:
        t_bl = rc_transition_time(cfg.write_driver_r, cfg.c_bl_line,
                                  0.0, cfg.write_supply / 2, cfg.write_supply)
    latency = max(t_bl, cfg.device_write_time())

    report = EnergyLatencyReport(
        energy=e_wl + e_bl + device_energy,
        latency=latency,
        breakdown={"wordline": e_wl, "bitline": e_bl, "device": device_energy},
        devices_switched=switched,
    )
    return new, report


def _check_write_supply(cfg: ArrayConfig) -> None:
    kind = cfg.tech.kind
    if kind is Technology.NEM_3T2N and cfg.write_supply < cfg.tech.device_params.v_pi:
        raise ConfigurationError("write supply below relay pull-in voltage")
    if kind is Technology.RRAM_2T2R:
        p = cfg.tech.device_params
        if cfg.write_supply < max(p.v_set, p.v_reset):
            raise ConfigurationError("write supply below RRAM set/reset requirement")


def _drive_masks(array: TcamArray, key: TernaryWord) -> tuple[np.ndarray, np.ndarray]:
    if len(key) != array.config.cols:
        raise ValueError(f"key length {len(key)} != array cols {array.config.cols}")
    sl_high = np.array([sym is TernaryValue.ONE for sym in key], dtype=bool)
    slbar_high = np.array([sym is TernaryValue.ZERO for sym in key], dtype=bool)
    return sl_high, slbar_high


def mismatch_counts(array: TcamArray, key: TernaryWord) -> np.ndarray:
    """Number of active pull-down paths per row for the given key."""
    sl_high, slbar_high = _drive_masks(array, key)
    paths = (array.on_a & slbar_high[None, :]).sum(axis=1) \
        + (array.on_b & sl_high[None, :]).sum(axis=1)
    return paths.astype(int)


def search_functional(array: TcamArray, key: TernaryWord) -> list[bool]:
    """Pure match logic: a row matches iff no cell activates a pull-down."""
    return [int(n) == 0 for n in mismatch_counts(array, key)]


def search_timed(array: TcamArray, key: TernaryWord
                 ) -> tuple[TcamArray, list[bool], list[float | None], EnergyLatencyReport]:
    """Search with matchline timing and supply-energy accounting.

    Energy covers re-precharging the matchlines that were left discharged,
    plus one swing per searchline that must newly rise for this key (lines
    already at their target level cost nothing), plus the configured sense
    overhead. Per-row settle times come from the pull-down RC path with the
    row's mismatch count in parallel; matched rows never settle and report
    None. The array-level latency is by convention the worst case: the
    settle time of a single-bit-mismatch row.
    """
    cfg = array.config
    counts = mismatch_counts(array, key)
    matches = [int(n) == 0 for n in counts]

    new = array.copy()

    # Precharge phase: restore every matchline left below vdd.
    discharged = array.ml_voltage < cfg.vdd
    e_ml = int(np.count_nonzero(discharged)) * line_switch_energy(cfg.c_ml_line, cfg.vdd)

    # Drive phase: searchlines move to the key's levels.
    sl_high, slbar_high = _drive_masks(array, key)
    sl_target = np.where(sl_high, cfg.vdd, 0.0)
    slbar_target = np.where(slbar_high, cfg.vdd, 0.0)
    rising = int(np.count_nonzero((array.sl <= 0) & (sl_target > 0))) \
        + int(np.count_nonzero((array.sl_bar <= 0) & (slbar_target > 0)))
    e_sl = rising * line_switch_energy(cfg.c_sl_line, cfg.vdd)
    new.sl = sl_target
    new.sl_bar = slbar_target

    # Evaluate: mismatching rows discharge, matching rows hold vdd.
    new.ml_voltage = np.where(counts == 0, cfg.vdd, 0.0)

    settle: list[float | None] = [
        None if n == 0 else matchline_settle_time(cfg.pulldown, cfg.c_ml_line,
                                                  int(n), cfg.vdd, cfg.v_sense)
        for n in counts
    ]
    latency = matchline_settle_time(cfg.pulldown, cfg.c_ml_line, 1, cfg.vdd, cfg.v_sense)

    report = EnergyLatencyReport(
        energy=e_ml + e_sl + cfg.sense_overhead,
        latency=latency,
        breakdown={"matchline": e_ml, "searchline": e_sl, "sense": cfg.sense_overhead},
    )
    return new, matches, settle, report


def precharge(array: TcamArray) -> tuple[TcamArray, float]:
    """Charge every matchline to vdd; discharged rows each cost one line swing."""
    cfg = array.config
    discharged = int(np.count_nonzero(array.ml_voltage < cfg.vdd))
    energy = discharged * line_switch_energy(cfg.c_ml_line, cfg.vdd)
    new = array.copy()
    new.ml_voltage = np.full(cfg.rows, cfg.vdd)
    return new, energy


def elapse(array: TcamArray, dt: float) -> tuple[TcamArray, list[tuple[int, int]]]:
    """Advance wall-clock time: relay gate charge leaks, stored bits may drop.

    Only the relay technology is dynamic; other arrays pass through
    unchanged. A closed relay whose gate decays to the pull-out threshold
    opens, and the cell coordinates are reported as a data-loss event. The
    decay is piecewise linear with the capacitance of the position actually
    held, so consecutive calls compose exactly like a single longer one.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if array.config.tech.kind is not Technology.NEM_3T2N or dt == 0:
        return array, []

    p = array.config.tech.device_params
    new = array.copy()
    lost = np.zeros((array.config.rows, array.config.cols), dtype=bool)
    for on, v in ((new.on_a, new.v_a), (new.on_b, new.v_b)):
        closed = on.copy()
        open_ = ~closed
        # Time for each closed gate to reach pull-out, in the same closed
        # form as relay_retention_time so boundaries agree exactly.
        with np.errstate(divide="ignore"):
            t_cross = np.where(closed, p.c_on * (v - p.v_po) / p.i_leak, np.inf)
        t_cross = np.maximum(t_cross, 0.0)
        crossed = closed & (t_cross <= dt)
        holding = closed & ~crossed

        v[holding] -= p.i_leak * dt / p.c_on
        v[open_] = np.maximum(0.0, v[open_] - p.i_leak * dt / p.c_off)
        # Crossed devices pull out, then keep leaking at the open-gate rate.
        rem = dt - t_cross[crossed]
        v[crossed] = np.maximum(0.0, np.minimum(v[crossed], p.v_po) - p.i_leak * rem / p.c_off)
        on[crossed] = False
        lost |= crossed

    events = [(int(r), int(c)) for r, c in np.argwhere(lost)]
    return new, events


def drive_all_gates(array: TcamArray, v: float, duration: float) -> tuple[TcamArray, int]:
    """Drive every relay gate in the array to v for one full write cycle.

    Models all wordlines high with all bitline pairs at v simultaneously.
    Threshold semantics match the single-relay state machine: at or above
    pull-in, open beams close; at or below pull-out, closed beams open;
    strictly inside the hysteresis window no position changes. Returns the
    new array and the number of beams that moved.
    """
    cfg = array.config
    if cfg.tech.kind is not Technology.NEM_3T2N:
        raise ConfigurationError("gate drive applies only to the relay technology")
    p = cfg.tech.device_params
    if duration < p.tau_mech:
        raise ValueError("drive pulse shorter than the mechanical switching time")
    new = array.copy()
    moved = 0
    for on in (new.on_a, new.on_b):
        if v >= p.v_pi:
            moved += int(np.count_nonzero(~on))
            on[:] = True
        elif v <= p.v_po:
            moved += int(np.count_nonzero(on))
            on[:] = False
    new.v_a[:] = v
    new.v_b[:] = v
    return new, moved


def export_contents(array: TcamArray) -> str:
    """Array contents as text, one row per line over {0, 1, X}."""
    lines = []
    for r in range(array.config.rows):
        lines.append(word_string(row_word(array, r)))
    return "\n".join(lines) + "\n"


def import_contents(config: ArrayConfig, text: str) -> TcamArray:
    """Rebuild an array from exported contents; dimensions must match config."""
    rows = [line.strip() for line in text.splitlines() if line.strip()]
    return from_symbols(config, rows)
