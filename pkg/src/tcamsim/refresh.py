"""Retention bookkeeping and refresh schemes for the dynamic relay array.

One-shot refresh (OSR) drives every relay gate to a refresh voltage strictly
inside the hysteresis window in a single operation, so no beam moves and no
prior read-out is needed. Row-by-row refresh is the conventional read plus
write-back sweep. A small event-driven simulator replays timed search/write
traces against a refresh policy to measure stalls and data loss.

Trace file format, one request per line:
    <time_ns> SEARCH <ternary-string>
    <time_ns> WRITE <row> <ternary-string>
with ternary strings over {0, 1, X}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .analog import rc_transition_time
from .array import (
    TcamArray,
    TernaryWord,
    drive_all_gates,
    elapse,
    row_word,
    search_functional,
    ternary_word,
    word_string,
    write_row,
)
from .cells import Technology
from .devices import RelayParams


class PolicyError(Exception):
    """Refresh policy incompatible with the device or array configuration."""


class NotApplicableError(Exception):
    """Requested a quantity the given refresh policy does not define."""


class TraceParseError(Exception):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class OneShot:
    v_r: float  # V, refresh voltage, strictly inside (v_po, v_pi)
    period: float  # s

    def __post_init__(self) -> None:
        if self.period <= 0:
            raise ValueError("refresh period must be positive")


@dataclass(frozen=True)
class RowByRow:
    period: float  # s

    def __post_init__(self) -> None:
        if self.period <= 0:
            raise ValueError("refresh period must be positive")


@dataclass(frozen=True)
class NoRefresh:
    pass


RefreshPolicy = Union[OneShot, RowByRow, NoRefresh]


@dataclass(frozen=True)
class SearchOp:
    key: TernaryWord


@dataclass(frozen=True)
class WriteOp:
    row: int
    word: TernaryWord


@dataclass(frozen=True)
class Request:
    at: float  # s
    op: SearchOp | WriteOp


@dataclass(frozen=True)
class WorkloadTrace:
    """Timed request stream; duration defaults to the last request time."""

    requests: tuple[Request, ...]
    duration: float | None = None

    def __post_init__(self) -> None:
        last = 0.0
        for req in self.requests:
            if req.at < last:
                raise ValueError("request timestamps must be non-decreasing")
            last = req.at
        if self.duration is not None and self.duration < last:
            raise ValueError("trace duration shorter than its last request")

    @property
    def horizon(self) -> float:
        if self.duration is not None:
            return self.duration
        return self.requests[-1].at if self.requests else 0.0


def parse_trace(text: str) -> WorkloadTrace:
    """Parse the trace file format; errors carry the offending line number."""
    requests: list[Request] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            at = float(parts[0]) * 1e-9
        except ValueError:
            raise TraceParseError(line_no, f"bad timestamp {parts[0]!r}") from None
        if at < 0:
            raise TraceParseError(line_no, "negative timestamp")
        kind = parts[1].upper() if len(parts) > 1 else ""
        try:
            if kind == "SEARCH" and len(parts) == 3:
                requests.append(Request(at, SearchOp(ternary_word(parts[2]))))
            elif kind == "WRITE" and len(parts) == 4:
                requests.append(Request(at, WriteOp(int(parts[2]), ternary_word(parts[3]))))
            else:
                raise TraceParseError(
                    line_no, f"expected 'SEARCH <word>' or 'WRITE <row> <word>', got {line!r}")
        except TraceParseError:
            raise
        except ValueError as exc:
            raise TraceParseError(line_no, str(exc)) from None
    try:
        return WorkloadTrace(tuple(requests))
    except ValueError as exc:
        raise TraceParseError(len(requests), str(exc)) from None


def format_trace(trace: WorkloadTrace) -> str:
    lines = []
    for req in trace.requests:
        t_ns = req.at * 1e9
        if isinstance(req.op, SearchOp):
            lines.append(f"{t_ns:g} SEARCH {word_string(req.op.key)}")
        else:
            lines.append(f"{t_ns:g} WRITE {req.op.row} {word_string(req.op.word)}")
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass
class RefreshStats:
    refresh_ops: int = 0
    refresh_energy: float = 0.0  # J
    average_power: float = 0.0  # W, refresh energy over the trace horizon
    stalled_requests: int = 0
    total_stall_time: float = 0.0  # s
    data_loss_events: int = 0


def _relay_params(array: TcamArray) -> RelayParams:
    if array.config.tech.kind is not Technology.NEM_3T2N:
        raise PolicyError("refresh applies only to the relay technology")
    return array.config.tech.device_params


def _write_cycle_time(array: TcamArray, v_swing: float) -> float:
    cfg = array.config
    t_line = 0.0
    if cfg.c_bl_line > 0:
        t_line = rc_transition_time(cfg.write_driver_r, cfg.c_bl_line,
                                    0.0, v_swing / 2, v_swing)
    return max(t_line, cfg.device_write_time())


def one_shot_refresh(array: TcamArray, v_r: float) -> tuple[TcamArray, float, float]:
    """Refresh the whole array with one simultaneous gate write at v_r.

    Every wordline rises to vdd and both bitlines of every column drive v_r,
    so each gate node is restored to v_r in a single write cycle. Because
    v_r lies strictly inside the hysteresis window, no beam position and no
    stored value changes. Returns (array, energy, latency).
    """
    params = _relay_params(array)
    if not params.v_po < v_r < params.v_pi:
        raise PolicyError(
            f"refresh voltage {v_r} V outside the hysteresis window "
            f"({params.v_po}, {params.v_pi}) V: would corrupt stored data")
    cfg = array.config
    latency = _write_cycle_time(array, v_r)
    new, _moved = drive_all_gates(array, v_r, latency)
    energy = cfg.rows * cfg.c_wl_line * cfg.vdd ** 2 \
        + 2 * cfg.cols * cfg.c_bl_line * v_r ** 2
    return new, energy, latency


def row_by_row_refresh(array: TcamArray) -> tuple[TcamArray, float, float, int]:
    """Conventional refresh: read each row, then write it back at full supply.

    The read phase activates the same word and bit lines as the write-back,
    so it is charged at the same line cost and cycle time. Returns
    (array, energy, latency, ops) with ops equal to the row count.
    """
    _relay_params(array)
    new = array
    energy = 0.0
    latency = 0.0
    for r in range(array.config.rows):
        word = row_word(new, r)
        new, rep = write_row(new, r, word)
        read_energy = rep.breakdown["wordline"] + rep.breakdown["bitline"]
        energy += read_energy + rep.energy
        latency += 2 * rep.latency
    return new, energy, latency, array.config.rows


def min_safe_period(params: RelayParams, policy: RefreshPolicy,
                    safety_factor: float = 0.8) -> float:
    """Longest safe one-shot period: the v_r-to-pull-out decay budget, derated.

    After an OSR every stored gate sits at v_r, so the next refresh must
    land before that charge leaks to the pull-out threshold.
    """
    if not isinstance(policy, OneShot):
        raise NotApplicableError("minimum safe period is defined for the one-shot policy")
    if not 0 < safety_factor <= 1:
        raise ValueError("safety factor must be in (0, 1]")
    if not params.v_po < policy.v_r < params.v_pi:
        raise PolicyError(f"refresh voltage {policy.v_r} V outside the hysteresis window")
    return safety_factor * params.c_on * (policy.v_r - params.v_po) / params.i_leak


def refresh_average_power(energy_per_refresh: float, period: float) -> float:
    """Average refresh power for one refresh of the given energy per period."""
    if period <= 0:
        raise ValueError("period must be positive")
    if energy_per_refresh < 0:
        raise ValueError("energy must be non-negative")
    return energy_per_refresh / period


def simulate_workload(array: TcamArray, trace: WorkloadTrace,
                      policy: RefreshPolicy) -> RefreshStats:
    """Replay a timed request stream under a refresh policy.

    Refresh operations fire at every whole period boundary up to the trace
    horizon and are atomic: a request arriving while one is in progress is
    stalled until it completes. Gate leakage advances between events, and
    every pull-out is recorded as a data-loss event.
    """
    stats = RefreshStats()
    arr = array
    now = 0.0
    busy_until = 0.0

    if isinstance(policy, (OneShot, RowByRow)):
        period = policy.period
        boundaries = []
        k = 1
        while k * period <= trace.horizon:
            boundaries.append(k * period)
            k += 1
    else:
        boundaries = []

    def advance(to: float) -> None:
        nonlocal arr, now
        if to > now:
            arr, events = elapse(arr, to - now)
            stats.data_loss_events += len(events)
            now = to

    def do_refresh() -> None:
        nonlocal arr, busy_until
        if isinstance(policy, OneShot):
            arr, energy, latency = one_shot_refresh(arr, policy.v_r)
            stats.refresh_ops += 1
        else:
            arr, energy, latency, ops = row_by_row_refresh(arr)
            stats.refresh_ops += ops
        stats.refresh_energy += energy
        busy_until = now + latency

    bi = 0
    for req in trace.requests:
        while bi < len(boundaries) and boundaries[bi] <= req.at:
            advance(boundaries[bi])
            do_refresh()
            bi += 1
        advance(req.at)
        if req.at < busy_until:
            stats.stalled_requests += 1
            stats.total_stall_time += busy_until - req.at
        if isinstance(req.op, SearchOp):
            search_functional(arr, req.op.key)
        else:
            arr, _ = write_row(arr, req.op.row, req.op.word)

    while bi < len(boundaries):
        advance(boundaries[bi])
        do_refresh()
        bi += 1
    advance(trace.horizon)

    if trace.horizon > 0:
        stats.average_power = stats.refresh_energy / trace.horizon
    return stats
