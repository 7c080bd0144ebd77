"""Per-technology TCAM cell semantics.

Encodes {0, 1, X} symbols into device states, derives searchline drives from
key symbols, evaluates matchline pull-down activation, and provides the
relative cell footprint used to scale line parasitics.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union

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
)


class TernaryValue(Enum):
    ZERO = "0"
    ONE = "1"
    DONT_CARE = "X"

    @property
    def symbol(self) -> str:
        return self.value


def parse_ternary(ch: str) -> TernaryValue:
    try:
        return TernaryValue(ch.upper())
    except ValueError:
        raise ValueError(f"invalid ternary symbol {ch!r}, expected 0, 1 or X") from None


class Technology(Enum):
    """Cell topology identifiers, named by their device counts."""

    NEM_3T2N = "nem3t2n"
    SRAM_16T = "sram16t"
    RRAM_2T2R = "rram2t2r"
    FEFET_2F = "fefet2f"


DeviceParams = Union[RelayParams, MosfetParams, RramParams, FefetParams]

# Relative area in transistor-equivalent units. The relays stack above the
# transistors in BEOL metal, so the 3T2N cell counts only its 3 transistors.
DEFAULT_FOOTPRINT = {
    Technology.NEM_3T2N: 3.0,
    Technology.SRAM_16T: 16.0,
    Technology.RRAM_2T2R: 2.0,
    Technology.FEFET_2F: 2.0,
}


@dataclass(frozen=True)
class CellTechnology:
    kind: Technology
    device_params: DeviceParams
    footprint_units: float

    def __post_init__(self) -> None:
        if self.footprint_units <= 0:
            raise ValueError("footprint_units must be positive")


def nem_3t2n(params: RelayParams | None = None,
             footprint_units: float | None = None) -> CellTechnology:
    return CellTechnology(Technology.NEM_3T2N, params or default_relay_params(),
                          footprint_units or DEFAULT_FOOTPRINT[Technology.NEM_3T2N])


def sram_16t(params: MosfetParams | None = None,
             footprint_units: float | None = None) -> CellTechnology:
    return CellTechnology(Technology.SRAM_16T, params or default_mosfet_params(),
                          footprint_units or DEFAULT_FOOTPRINT[Technology.SRAM_16T])


def rram_2t2r(params: RramParams | None = None,
              footprint_units: float | None = None) -> CellTechnology:
    return CellTechnology(Technology.RRAM_2T2R, params or default_rram_params(),
                          footprint_units or DEFAULT_FOOTPRINT[Technology.RRAM_2T2R])


def fefet_2f(params: FefetParams | None = None,
             footprint_units: float | None = None) -> CellTechnology:
    return CellTechnology(Technology.FEFET_2F, params or default_fefet_params(),
                          footprint_units or DEFAULT_FOOTPRINT[Technology.FEFET_2F])


@dataclass(frozen=True)
class NemCellState:
    """Two parallel relays; n1 holds the stored bit, n2 its complement."""

    n1: RelayState
    n2: RelayState


@dataclass(frozen=True)
class SramCellState:
    """Static latch pair modeled as a held symbol."""

    bit: TernaryValue


@dataclass(frozen=True)
class RramCellState:
    r1: RramState
    r2: RramState


@dataclass(frozen=True)
class FefetCellState:
    f1: FefetState
    f2: FefetState


CellState = Union[NemCellState, SramCellState, RramCellState, FefetCellState]


class CorruptedCellError(Exception):
    """Both complementary devices conduct: an encoding the cell can never reach."""


class ConfigurationError(Exception):
    """A supply or parameter cannot support the requested operation."""


@dataclass(frozen=True)
class SearchDrive:
    """Searchline pair voltages for one column; each is 0 or vdd, never both vdd."""

    sl: float
    sl_bar: float

    def __post_init__(self) -> None:
        if self.sl > 0 and self.sl_bar > 0:
            raise ValueError("sl and sl_bar must never be driven high together")


def encode_ternary(tech: CellTechnology, value: TernaryValue, vdd: float = 1.0) -> CellState:
    """Encode a ternary symbol as complementary device states.

    ONE makes the first device conducting-capable and the second blocking,
    ZERO is the mirror image, and DONT_CARE leaves both devices blocking so
    the cell can never discharge a matchline.
    """
    first = value is TernaryValue.ONE
    second = value is TernaryValue.ZERO
    if tech.kind is Technology.NEM_3T2N:
        return NemCellState(
            n1=RelayState(Position.CLOSED if first else Position.OPEN,
                          v_gb=vdd if first else 0.0),
            n2=RelayState(Position.CLOSED if second else Position.OPEN,
                          v_gb=vdd if second else 0.0),
        )
    if tech.kind is Technology.SRAM_16T:
        return SramCellState(bit=value)
    if tech.kind is Technology.RRAM_2T2R:
        return RramCellState(
            r1=RramState(RramLevel.LOW if first else RramLevel.HIGH),
            r2=RramState(RramLevel.LOW if second else RramLevel.HIGH),
        )
    return FefetCellState(
        f1=FefetState(FefetPolarization.LOW_VT if first else FefetPolarization.HIGH_VT),
        f2=FefetState(FefetPolarization.LOW_VT if second else FefetPolarization.HIGH_VT),
    )


def _conducting_pair(state: CellState) -> tuple[bool, bool]:
    if isinstance(state, NemCellState):
        return (state.n1.position is Position.CLOSED,
                state.n2.position is Position.CLOSED)
    if isinstance(state, SramCellState):
        return state.bit is TernaryValue.ONE, state.bit is TernaryValue.ZERO
    if isinstance(state, RramCellState):
        return (state.r1.resistance is RramLevel.LOW,
                state.r2.resistance is RramLevel.LOW)
    return (state.f1.polarization is FefetPolarization.LOW_VT,
            state.f2.polarization is FefetPolarization.LOW_VT)


def decode_ternary(state: CellState) -> TernaryValue:
    """Exact inverse of encode_ternary; rejects both-devices-conducting states."""
    first, second = _conducting_pair(state)
    if first and second:
        raise CorruptedCellError("both complementary devices conduct")
    if first:
        return TernaryValue.ONE
    if second:
        return TernaryValue.ZERO
    return TernaryValue.DONT_CARE


def key_to_drive(key_bit: TernaryValue, vdd: float) -> SearchDrive:
    """Searchline voltages for one key symbol.

    A don't-care key bit grounds both lines: the unique drive for which no
    stored state can activate a pull-down, so the column always matches.
    """
    if vdd <= 0:
        raise ValueError("vdd must be positive")
    if key_bit is TernaryValue.ONE:
        return SearchDrive(sl=vdd, sl_bar=0.0)
    if key_bit is TernaryValue.ZERO:
        return SearchDrive(sl=0.0, sl_bar=vdd)
    return SearchDrive(sl=0.0, sl_bar=0.0)


def pulldown_active(state: CellState, drive: SearchDrive) -> bool:
    """Whether the cell discharges its matchline under the given drive.

    In the 3T2N cell, N1 gates the complement searchline onto the sense
    transistor and N2 gates the true searchline; the other technologies wire
    their conducting devices the same way. The result is the XNOR matchline
    rule: a definite stored bit mismatching a definite key bit, and nothing
    else, pulls the line down.
    """
    first, second = _conducting_pair(state)
    return (first and drive.sl_bar > 0) or (second and drive.sl > 0)


def cell_write(tech: CellTechnology, old: CellState, new_value: TernaryValue,
               vdd: float) -> tuple[CellState, int]:
    """Re-encode a cell and count devices that change conduction state.

    The returned count feeds array-level energy accounting. The supply must
    be able to complete the technology's write: at least v_pi for relays and
    at least the set/reset magnitudes for RRAM. FeFET writes always use the
    +/- v_write programming pulses.
    """
    if tech.kind is Technology.NEM_3T2N:
        if vdd < tech.device_params.v_pi:
            raise ConfigurationError(
                f"write supply {vdd} V below relay pull-in {tech.device_params.v_pi} V")
    elif tech.kind is Technology.RRAM_2T2R:
        if vdd < max(tech.device_params.v_set, tech.device_params.v_reset):
            raise ConfigurationError(
                f"write supply {vdd} V below RRAM set/reset requirement")
    elif vdd <= 0:
        raise ConfigurationError("write supply must be positive")

    new_state = encode_ternary(tech, new_value, vdd=vdd)
    before = _conducting_pair(old)
    after = _conducting_pair(new_state)
    switched = sum(1 for b, a in zip(before, after) if b != a)
    return new_state, switched


def cell_footprint(tech: CellTechnology) -> float:
    """Relative cell area in transistor-equivalent units."""
    return tech.footprint_units
