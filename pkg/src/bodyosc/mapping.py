"""Mapping functions from normalized input to sound parameters.

Amplitude maps take a normalized speed s in [0,1] and return amplitude in
[0,1]. The exponential (dB-affine) form follows the Weber-Fechner picture:
equal input steps give equal loudness steps in decibels, so perceived
loudness tracks movement linearly. A small gate forces exact silence at
rest, which a pure exponential can never reach. The pitch map is the
Theremin-style exponential: equal position steps give equal musical
intervals.

The JND analyzer quantifies the match between an input just-noticeable
difference (a Weber fraction of speed) and the output JND (a dB threshold):
for each grid point it reports how many dB one input JND moves the output,
and whether that step is perceptible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class Linear:
    """amplitude = s."""


@dataclass(frozen=True)
class ExpDb:
    """Level affine in s: db_floor dB at s=0 up to 0 dB at s=1, with a hard
    silence gate below `gate`."""

    db_floor: float = -60.0
    gate: float = 0.02

    def __post_init__(self) -> None:
        if self.db_floor >= 0.0:
            raise ValueError(f"db_floor must be < 0, got {self.db_floor}")
        if not 0.0 <= self.gate < 1.0:
            raise ValueError(f"gate must be in [0,1), got {self.gate}")


@dataclass(frozen=True)
class ExpNorm:
    """Normalized exponential (exp(k*s)-1)/(exp(k)-1): reaches exact zero at
    rest without a gate, at the cost of the exact-Weber property."""

    k: float = 4.0

    def __post_init__(self) -> None:
        if self.k <= 0.0:
            raise ValueError(f"k must be > 0, got {self.k}")


@dataclass(frozen=True)
class PitchExp:
    """f = f0 * 2**(octaves * u): u sweeps `octaves` octaves above f0."""

    f0: float = 220.0
    octaves: float = 2.0

    def __post_init__(self) -> None:
        if self.f0 <= 0.0:
            raise ValueError(f"f0 must be > 0, got {self.f0}")
        if self.octaves <= 0.0:
            raise ValueError(f"octaves must be > 0, got {self.octaves}")


MappingFn = Linear | ExpDb | ExpNorm | PitchExp

FUNCTION_KINDS = ("linear", "exp_db", "exp_norm", "pitch_exp")


def function_kind(fn: MappingFn) -> str:
    return {Linear: "linear", ExpDb: "exp_db", ExpNorm: "exp_norm", PitchExp: "pitch_exp"}[type(fn)]


def is_pitch(fn: MappingFn) -> bool:
    return isinstance(fn, PitchExp)


def map_linear(s: float) -> float:
    return s


def map_exp_db(s: float, fn: ExpDb) -> float:
    if s < fn.gate:
        return 0.0
    return 10.0 ** (fn.db_floor * (1.0 - s) / 20.0)


def map_exp_norm(s: float, fn: ExpNorm) -> float:
    return math.expm1(fn.k * s) / math.expm1(fn.k)


def map_pitch(u: float, fn: PitchExp) -> float:
    return fn.f0 * 2.0 ** (fn.octaves * u)


def apply(fn: MappingFn, s: float) -> float:
    if isinstance(fn, Linear):
        return map_linear(s)
    if isinstance(fn, ExpDb):
        return map_exp_db(s, fn)
    if isinstance(fn, ExpNorm):
        return map_exp_norm(s, fn)
    return map_pitch(s, fn)


@dataclass(frozen=True)
class SpeedCalibration:
    s_max: float = 6.0  # full-scale speed, body-lengths/second
    method: str = "fixed"  # "fixed" | "percentile"
    percentile: float = 95.0

    def __post_init__(self) -> None:
        if self.s_max <= 0.0:
            raise ValueError(f"s_max must be > 0, got {self.s_max}")
        if self.method not in ("fixed", "percentile"):
            raise ValueError(f"unknown calibration method {self.method!r}")
        if not 0.0 < self.percentile <= 100.0:
            raise ValueError(f"percentile must be in (0,100], got {self.percentile}")


def normalize_speed(s_bl: float, cal: SpeedCalibration) -> float:
    """Map body-lengths/second onto [0,1]: 0 is rest, 1 is full-scale
    (clamped above s_max)."""
    return min(s_bl / cal.s_max, 1.0)


MIN_CALIBRATION_SAMPLES = 30


def calibrate(speeds: Sequence[float], percentile: float = 95.0) -> SpeedCalibration:
    """Fit the full-scale speed as the nearest-rank percentile of recorded
    body-length speeds."""
    if len(speeds) < MIN_CALIBRATION_SAMPLES:
        raise ValueError(
            f"too few samples for calibration: {len(speeds)} < {MIN_CALIBRATION_SAMPLES}"
        )
    if not 0.0 < percentile <= 100.0:
        raise ValueError(f"percentile must be in (0,100], got {percentile}")
    ordered = sorted(speeds)
    rank = math.ceil(percentile / 100.0 * len(ordered))
    s_max = ordered[max(rank, 1) - 1]
    if s_max <= 0.0:
        raise ValueError("calibrated s_max is not positive; move during calibration")
    return SpeedCalibration(s_max=s_max, method="percentile", percentile=percentile)


def speed_grid(n: int = 200) -> list[float]:
    """n uniform grid points (1/n, 2/n, ..., 1)."""
    return [(i + 1) / n for i in range(n)]


@dataclass(frozen=True)
class JndReport:
    s: tuple[float, ...]
    step_db: tuple[float, ...]
    perceptible: tuple[bool, ...]
    uniformity: float  # max/min step over the perceptible region (nan if empty)
    w_in: float
    l_jnd: float

    def to_csv(self) -> str:
        lines = ["s,step_db,perceptible"]
        for s, step, perc in zip(self.s, self.step_db, self.perceptible):
            lines.append(f"{s!r},{step!r},{int(perc)}")
        return "\n".join(lines) + "\n"


def jnd_analyze(
    fn: MappingFn,
    w_in: float = 0.1,
    l_jnd: float = 1.0,
    n: int = 200,
) -> JndReport:
    """Report, per grid point s, the output step in dB produced by one input
    JND (s -> s*(1+w_in)), and whether that step clears the output JND.

    Grid points where either end of the step leaves [gate, 1], or where the
    mapping is silent, are excluded rather than treated as errors.
    """
    if is_pitch(fn):
        raise ValueError("JND analysis applies to amplitude mappings, not pitch")
    if w_in <= 0.0:
        raise ValueError(f"w_in must be > 0, got {w_in}")
    if l_jnd <= 0.0:
        raise ValueError(f"l_jnd must be > 0, got {l_jnd}")
    gate = fn.gate if isinstance(fn, ExpDb) else 0.0
    ss: list[float] = []
    steps: list[float] = []
    percs: list[bool] = []
    for s in speed_grid(n):
        s_up = s * (1.0 + w_in)
        if s < gate or s_up > 1.0:
            continue
        base = apply(fn, s)
        if base <= 0.0:
            continue
        step = 20.0 * math.log10(apply(fn, s_up) / base)
        ss.append(s)
        steps.append(step)
        percs.append(step >= l_jnd)
    perceptible_steps = [st for st, p in zip(steps, percs) if p]
    if perceptible_steps:
        uniformity = max(perceptible_steps) / min(perceptible_steps)
    else:
        uniformity = math.nan
    return JndReport(
        s=tuple(ss),
        step_db=tuple(steps),
        perceptible=tuple(percs),
        uniformity=uniformity,
        w_in=w_in,
        l_jnd=l_jnd,
    )


def amplitude_curve(fn: MappingFn, n: int = 200) -> list[tuple[float, float]]:
    """(s, m(s)) over the n-point grid, for plotting or CSV export."""
    return [(s, apply(fn, s)) for s in speed_grid(n)]
