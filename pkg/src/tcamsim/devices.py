"""Behavioral models for the four underlying memory devices.

A four-terminal NEM relay with pull-in/pull-out hysteresis and a floating
gate-body charge node, a switch-RC MOSFET, a bipolar two-level RRAM, and a
two-state FeFET. All states are immutable values; operations are pure
functions from (state, inputs) to a new state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .analog import resistive_write_energy

# Supply ceiling for gate-node biases; must admit the +/-4 V FeFET writes.
DEFAULT_VDD_MAX = 4.5

# Gate leakage fitted so a closed relay written at 1.0 V decays to pull-out
# in 26.5 us (see bench.calibrate, which recomputes it from its targets).
DEFAULT_I_LEAK = 20e-18 * (1.0 - 0.13) / 26.5e-6


class Position(Enum):
    """Mechanical state of the relay beam."""

    OPEN = "open"
    CLOSED = "closed"


@dataclass(frozen=True)
class RelayParams:
    """NEM relay compact-model parameters.

    The beam closes once the gate-body voltage has stayed at or above v_pi
    for tau_mech, and opens symmetrically at or below v_po. Strictly inside
    (v_po, v_pi) the position holds regardless of bias: the hysteresis
    window that makes one-shot refresh possible.
    """

    v_pi: float  # V, pull-in threshold
    v_po: float  # V, pull-out threshold
    c_on: float  # F, gate-body capacitance, beam closed
    c_off: float  # F, gate-body capacitance, beam open
    r_on: float  # ohm, drain-source resistance, closed
    tau_mech: float  # s, mechanical switching latency
    i_leak: float  # A, constant-current gate leakage

    def __post_init__(self) -> None:
        if not 0 < self.v_po < self.v_pi:
            raise ValueError(f"need 0 < v_po < v_pi, got v_po={self.v_po}, v_pi={self.v_pi}")
        if self.c_off > self.c_on:
            raise ValueError("c_off must not exceed c_on")
        for name in ("c_on", "c_off", "r_on", "tau_mech", "i_leak"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    def c_gb(self, position: Position) -> float:
        return self.c_on if position is Position.CLOSED else self.c_off


def default_relay_params(i_leak: float = DEFAULT_I_LEAK) -> RelayParams:
    """Vendor-style defaults for a 7.6 nm gate-gap relay."""
    return RelayParams(v_pi=0.53, v_po=0.13, c_on=20e-18, c_off=15e-18,
                       r_on=1e3, tau_mech=2e-9, i_leak=i_leak)


@dataclass(frozen=True)
class RelayState:
    """Beam position plus the stored charge on the floating gate node.

    pending tracks elapsed time of an in-progress mechanical transition and
    resets whenever the bias re-enters the hysteresis window.
    """

    position: Position = Position.OPEN
    v_gb: float = 0.0  # V
    pending: float = 0.0  # s


@dataclass(frozen=True)
class MosfetParams:
    """Switch-RC transistor: on-resistance when overdriven plus gate load."""

    r_eff: float  # ohm
    c_gate: float  # F

    def __post_init__(self) -> None:
        if self.r_eff <= 0 or self.c_gate <= 0:
            raise ValueError("r_eff and c_gate must be strictly positive")


def default_mosfet_params() -> MosfetParams:
    """Stand-in for a minimum-size 45 nm-class NMOS."""
    return MosfetParams(r_eff=10e3, c_gate=50e-18)


def relay_apply_bias(state: RelayState, params: RelayParams, v_gb: float,
                     duration: float, vdd_max: float = DEFAULT_VDD_MAX) -> RelayState:
    """Hold a gate-body bias on the relay for a given duration.

    An open relay starts pulling in at v_gb >= v_pi and closes once the
    accumulated bias time reaches tau_mech; a closed relay pulls out at
    v_gb <= v_po with the same mechanical delay. Any bias strictly inside
    the hysteresis window leaves the position unchanged and resets the
    pending transition timer. The stored gate voltage becomes the applied
    bias either way.
    """
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if not 0 <= v_gb <= vdd_max:
        raise ValueError(f"bias {v_gb} outside supply range [0, {vdd_max}]")

    if state.position is Position.OPEN:
        driving = v_gb >= params.v_pi
        target = Position.CLOSED
    else:
        driving = v_gb <= params.v_po
        target = Position.OPEN

    if not driving:
        return RelayState(position=state.position, v_gb=v_gb, pending=0.0)

    accumulated = state.pending + duration
    if accumulated >= params.tau_mech:
        return RelayState(position=target, v_gb=v_gb, pending=0.0)
    return RelayState(position=state.position, v_gb=v_gb, pending=accumulated)


def relay_leak_decay(state: RelayState, params: RelayParams,
                     dt: float) -> tuple[RelayState, bool]:
    """Let the floating gate node leak for dt seconds.

    Constant-current decay: v drops at i_leak / c_gb(position). A closed
    relay whose gate reaches v_po pulls out; the remaining interval then
    decays at the open-position rate. Returns the new state and whether a
    pull-out (stored-data loss) happened during this interval.

    The pull-out test is done in the time domain, dt >= c_on*(v - v_po)/i_leak,
    so it agrees exactly with relay_retention_time.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    v = state.v_gb
    if state.position is Position.CLOSED and v > params.v_po:
        t_cross = params.c_on * (v - params.v_po) / params.i_leak
        if dt < t_cross:
            return replace(state, v_gb=v - params.i_leak * dt / params.c_on), False
        v_after = max(0.0, params.v_po - params.i_leak * (dt - t_cross) / params.c_off)
        return RelayState(position=Position.OPEN, v_gb=v_after, pending=0.0), True
    if state.position is Position.CLOSED:
        # Entered already at or below pull-out: the beam releases immediately.
        v_after = max(0.0, v - params.i_leak * dt / params.c_off)
        return RelayState(position=Position.OPEN, v_gb=v_after, pending=0.0), True
    v_after = max(0.0, v - params.i_leak * dt / params.c_off)
    return replace(state, v_gb=v_after), False


def relay_retention_time(params: RelayParams, v_start: float) -> float:
    """Time for a closed relay's gate to leak from v_start down to pull-out."""
    if v_start <= params.v_po:
        raise ValueError(f"v_start={v_start} is at or below v_po: data already lost")
    return params.c_on * (v_start - params.v_po) / params.i_leak


class RramLevel(Enum):
    LOW = "low"  # conducting, r_on
    HIGH = "high"  # blocking, r_off


@dataclass(frozen=True)
class RramParams:
    r_on: float  # ohm, low-resistance state
    r_off: float  # ohm, high-resistance state
    v_set: float  # V, positive set threshold
    v_reset: float  # V, reset threshold magnitude
    t_write: float  # s, programming pulse width

    def __post_init__(self) -> None:
        if self.r_on >= self.r_off:
            raise ValueError("need r_on < r_off")
        for name in ("r_on", "r_off", "v_set", "v_reset", "t_write"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    def resistance(self, level: RramLevel) -> float:
        return self.r_on if level is RramLevel.LOW else self.r_off


def default_rram_params() -> RramParams:
    return RramParams(r_on=20e3, r_off=2e6, v_set=1.8, v_reset=1.2, t_write=10e-9)


@dataclass(frozen=True)
class RramState:
    resistance: RramLevel = RramLevel.HIGH


def rram_write_transition(state: RramState, params: RramParams, voltage: float,
                          duration: float) -> tuple[RramState, float]:
    """Apply a signed programming pulse and return (new state, pulse energy).

    A positive pulse at or above v_set held for t_write sets LOW; a negative
    pulse of magnitude at least v_reset held for t_write resets HIGH; any
    other pulse leaves the level unchanged. Writes are current-driven: a
    completed transition conducts through r_on (the filament exists at one
    end of either transition), an uncompleted pulse through the present
    resistance.
    """
    if duration < 0:
        raise ValueError("duration must be non-negative")
    new_level = state.resistance
    if voltage >= params.v_set and duration >= params.t_write:
        new_level = RramLevel.LOW
    elif voltage <= -params.v_reset and duration >= params.t_write:
        new_level = RramLevel.HIGH
    if new_level is not state.resistance:
        r_conduction = params.r_on
    else:
        r_conduction = params.resistance(state.resistance)
    energy = resistive_write_energy(voltage, r_conduction, duration)
    return RramState(resistance=new_level), energy


class FefetPolarization(Enum):
    LOW_VT = "low_vt"  # conducting as a pull-down
    HIGH_VT = "high_vt"


@dataclass(frozen=True)
class FefetParams:
    v_write: float  # V, programming magnitude, applied as +/- v_write
    t_write: float  # s

    def __post_init__(self) -> None:
        if self.v_write <= 0 or self.t_write <= 0:
            raise ValueError("v_write and t_write must be strictly positive")


def default_fefet_params() -> FefetParams:
    return FefetParams(v_write=4.0, t_write=10e-9)


@dataclass(frozen=True)
class FefetState:
    polarization: FefetPolarization = FefetPolarization.HIGH_VT


def fefet_write_transition(state: FefetState, params: FefetParams, voltage: float,
                           duration: float) -> FefetState:
    """Apply a signed gate pulse; the ferroelectric is a purely capacitive load.

    +v_write held for t_write programs LOW_VT, -v_write programs HIGH_VT,
    anything weaker or shorter changes nothing. No resistive write energy;
    line-charging energy is accounted at the array level.
    """
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if duration < params.t_write:
        return state
    if voltage >= params.v_write:
        return FefetState(polarization=FefetPolarization.LOW_VT)
    if voltage <= -params.v_write:
        return FefetState(polarization=FefetPolarization.HIGH_VT)
    return state
