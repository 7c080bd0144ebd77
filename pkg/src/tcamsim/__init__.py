"""Device-behavioral simulator and benchmark harness for dynamic TCAM arrays
built from nanoelectromechanical relays, with SRAM, RRAM, and FeFET baselines.
"""

from .analog import (
    DischargePath,
    EnergyLatencyReport,
    RcStage,
    edp,
    line_switch_energy,
    matchline_settle_time,
    rc_transition_time,
    resistive_write_energy,
)
from .array import (
    ArrayConfig,
    LineParasitics,
    TcamArray,
    TernaryWord,
    cell_state,
    elapse,
    export_contents,
    from_symbol_codes,
    from_symbols,
    import_contents,
    symbol_codes,
    new_array,
    precharge,
    row_word,
    search_functional,
    search_timed,
    ternary_word,
    word_string,
    write_row,
)
from .bench import (
    BenchReport,
    BenchRow,
    Calibration,
    CalibrationError,
    CalibrationTargets,
    FixedDeviceParams,
    calibrate,
    run_all_benches,
    run_refresh_bench,
    run_search_bench,
    run_write_bench,
)
from .cells import (
    CellState,
    CellTechnology,
    ConfigurationError,
    CorruptedCellError,
    SearchDrive,
    Technology,
    TernaryValue,
    cell_footprint,
    cell_write,
    decode_ternary,
    encode_ternary,
    fefet_2f,
    key_to_drive,
    nem_3t2n,
    pulldown_active,
    rram_2t2r,
    sram_16t,
)
from .devices import (
    FefetParams,
    FefetPolarization,
    FefetState,
    MosfetParams,
    Position,
    RelayParams,
    RelayState,
    RramLevel,
    RramParams,
    RramState,
    default_fefet_params,
    default_mosfet_params,
    default_relay_params,
    default_rram_params,
    fefet_write_transition,
    relay_apply_bias,
    relay_leak_decay,
    relay_retention_time,
    rram_write_transition,
)
from .refresh import (
    NoRefresh,
    NotApplicableError,
    OneShot,
    PolicyError,
    RefreshStats,
    Request,
    RowByRow,
    SearchOp,
    WorkloadTrace,
    WriteOp,
    min_safe_period,
    one_shot_refresh,
    parse_trace,
    refresh_average_power,
    row_by_row_refresh,
    simulate_workload,
)

__version__ = "0.1.0"
