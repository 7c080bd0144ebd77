"""Closed-form RC timing and energy primitives shared by all cell technologies.

Single-pole RC solutions only: line charging, matchline discharge through a
staged pull-down network, resistive write energy, and energy-delay product.
Energies follow the supply-charge convention E = C * V^2 per 0 -> V swing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class RcStage:
    """One stage of a discharge path: series resistance driving a node capacitance."""

    r: float  # ohm
    c: float  # F

    def __post_init__(self) -> None:
        if self.r <= 0 or self.c <= 0:
            raise ValueError(f"RC stage needs positive r and c, got r={self.r}, c={self.c}")


@dataclass(frozen=True)
class DischargePath:
    """Ordered pull-down stages between a matchline and ground.

    The last stage is the one that discharges the matchline itself; its
    resistance is shared by parallel mismatching cells and its capacitance is
    replaced by the actual matchline load at evaluation time. Earlier stages
    model intermediate nodes, e.g. a relay charging a sense transistor gate.
    """

    stages: tuple[RcStage, ...]

    def __post_init__(self) -> None:
        if not self.stages:
            raise ValueError("discharge path needs at least one stage")


def rc_transition_time(r: float, c: float, v_from: float, v_to_threshold: float,
                       v_rail: float) -> float:
    """Time for a single-pole RC node to move from v_from to a threshold.

    The node relaxes exponentially toward v_rail; returns
    t = r*c*ln(|v_from - v_rail| / |v_to_threshold - v_rail|).
    The threshold must lie between v_from (inclusive) and v_rail (exclusive).
    """
    if r <= 0 or c <= 0:
        raise ValueError("r and c must be positive")
    span = abs(v_from - v_rail)
    rem = abs(v_to_threshold - v_rail)
    if span == 0:
        raise ValueError("v_from equals v_rail: node never moves")
    if rem == 0 or rem > span:
        raise ValueError(
            f"threshold {v_to_threshold} not between v_from={v_from} and v_rail={v_rail}")
    return r * c * math.log(span / rem)


def matchline_settle_time(path: DischargePath, c_ml_total: float, n_mismatch: int,
                          vdd: float, v_sense: float) -> float:
    """Worst-case time for a pre-charged matchline to settle below v_sense.

    Stage delays are summed. The final stage discharges c_ml_total and its
    resistance is divided by n_mismatch (parallel pull-down paths). Every
    stage uses the same settle fraction ln(vdd/v_sense), so the threshold
    choice rescales all technologies identically and cancels from ratios.

    n_mismatch = 0 means no pull-down conducts: the line never settles and
    math.inf is returned as the distinct no-discharge result.
    """
    if n_mismatch < 0:
        raise ValueError("n_mismatch must be non-negative")
    if n_mismatch == 0:
        return math.inf
    if not 0 < v_sense < vdd:
        raise ValueError("v_sense must lie strictly between 0 and vdd")
    factor = math.log(vdd / v_sense)
    t = sum(stage.r * stage.c for stage in path.stages[:-1]) * factor
    final = path.stages[-1]
    t += (final.r / n_mismatch) * c_ml_total * factor
    return t


def line_switch_energy(c_total: float, v_swing: float) -> float:
    """Supply energy to charge a line of c_total farads through v_swing volts."""
    if c_total < 0:
        raise ValueError("capacitance must be non-negative")
    return c_total * v_swing * v_swing


def resistive_write_energy(v: float, r: float, t: float) -> float:
    """Conduction energy v^2 * t / r of a resistive programming pulse."""
    if r <= 0:
        raise ValueError("resistance must be positive")
    if t < 0:
        raise ValueError("duration must be non-negative")
    return v * v * t / r


def edp(energy: float, latency: float) -> float:
    """Energy-delay product in joule-seconds."""
    return energy * latency


@dataclass
class EnergyLatencyReport:
    """Per-operation energy and latency with a per-line energy breakdown.

    breakdown maps contribution names (``wordline``, ``bitline``, ``device``,
    ``matchline``, ``searchline``) to joules; entries sum to ``energy``.
    devices_switched counts storage devices that changed conduction state.
    """

    energy: float  # J
    latency: float  # s
    breakdown: dict[str, float] = field(default_factory=dict)
    devices_switched: int = 0

    @property
    def edp(self) -> float:
        return self.energy * self.latency
