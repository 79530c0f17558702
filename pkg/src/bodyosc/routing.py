"""Feature-to-parameter routing: bind one source feature to one mapping
function and one output address with a target range.

Routing is pure: identical features and specs always produce the identical
update list, one update per spec per frame in spec order. Invalid sources
fail to silence: the spec's send_on_invalid value is emitted (default: the
low end of the range for amplitude-like mappings) or the update is
suppressed entirely (default for pitch, where any value would be a note).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .body_frame import BodyRefs, NormalizedPosition, body_speed
from .kinematics import KinematicFeatures
from .mapping import MappingFn, PitchExp, SpeedCalibration, apply, is_pitch, normalize_speed
from .wire import KEYPOINT_ORDER

SOURCE_FEATURES = ("speed", "pos_u", "pos_v", "rel_speed")

# Marker for "pick the default for this mapping kind" (lo for amplitude,
# suppress for pitch).
AUTO = object()


def _validate_osc_address(address: str) -> None:
    # Mirrors osc.validate_address; duplicated to keep routing import-free
    # of the transport layer.
    if not address.startswith("/") or len(address) < 2:
        raise ValueError(f"OSC address must start with '/': {address!r}")
    for ch in address:
        if not 0x21 <= ord(ch) <= 0x7E:
            raise ValueError(f"illegal character {ch!r} in OSC address {address!r}")


@dataclass(frozen=True)
class Source:
    feature: str  # speed | pos_u | pos_v | rel_speed
    point: str = ""
    pair: tuple[str, str] | None = None  # for rel_speed

    def __post_init__(self) -> None:
        if self.feature not in SOURCE_FEATURES:
            raise ValueError(f"unknown source feature {self.feature!r}")
        if self.feature == "rel_speed":
            if self.pair is None:
                raise ValueError("rel_speed source requires a point pair")
            for name in self.pair:
                if name not in KEYPOINT_ORDER:
                    raise ValueError(f"unknown keypoint {name!r} in pair")
        else:
            if self.point not in KEYPOINT_ORDER:
                raise ValueError(f"unknown keypoint {self.point!r}")


@dataclass(frozen=True)
class MappingSpec:
    id: str
    source: Source
    function: MappingFn
    out_address: str
    out_range: tuple[float, float]
    strategy: str | None = None  # reference-strategy kind override
    send_on_invalid: float | None = field(default=AUTO)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("mapping id must be non-empty")
        _validate_osc_address(self.out_address)
        lo, hi = self.out_range
        if not lo < hi:
            raise ValueError(f"out_range must have lo < hi, got [{lo}, {hi}]")
        if isinstance(self.function, PitchExp):
            f0 = self.function.f0
            f1 = f0 * 2.0 ** self.function.octaves
            if abs(lo - f0) > 1e-6 * f0 or abs(hi - f1) > 1e-6 * f1:
                raise ValueError(
                    f"pitch mapping must declare out_range [{f0}, {f1}], got [{lo}, {hi}]"
                )
        if self.send_on_invalid is AUTO:
            default = None if is_pitch(self.function) else lo
            object.__setattr__(self, "send_on_invalid", default)
        elif self.send_on_invalid is not None:
            object.__setattr__(self, "send_on_invalid", float(self.send_on_invalid))


@dataclass(frozen=True)
class ParamUpdate:
    t: float  # milliseconds
    address: str
    value: float


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo), hi)


def _source_value(
    spec: MappingSpec,
    features: KinematicFeatures,
    positions: Mapping[str, Mapping[str, NormalizedPosition]],
    refs: BodyRefs,
    calibration: SpeedCalibration,
    default_strategy: str,
) -> tuple[float, bool]:
    src = spec.source
    if src.feature == "speed":
        pf = features.points.get(src.point)
        if pf is None or not pf.valid or not refs.valid:
            return 0.0, False
        return normalize_speed(body_speed(pf.speed, refs), calibration), True
    if src.feature == "rel_speed":
        rv = features.rel_velocity(*src.pair)
        if rv is None or not rv.valid or not refs.valid:
            return 0.0, False
        return normalize_speed(body_speed(rv.speed, refs), calibration), True
    kind = spec.strategy or default_strategy
    pos = positions.get(kind, {}).get(src.point)
    if pos is None or not pos.valid:
        return 0.0, False
    return (pos.u if src.feature == "pos_u" else pos.v), True


def route(
    features: KinematicFeatures,
    positions: Mapping[str, Mapping[str, NormalizedPosition]],
    specs: Sequence[MappingSpec],
    *,
    refs: BodyRefs,
    calibration: SpeedCalibration,
    default_strategy: str,
) -> list[ParamUpdate]:
    """One ParamUpdate per spec, in spec order.

    Amplitude-like mapped values in [0,1] are rescaled affinely into the
    spec's out_range; pitch values are already Hz and pass through. Every
    emitted value is clamped into the range.
    """
    updates: list[ParamUpdate] = []
    for spec in specs:
        lo, hi = spec.out_range
        value, ok = _source_value(spec, features, positions, refs, calibration, default_strategy)
        if not ok:
            if spec.send_on_invalid is None:
                continue
            updates.append(ParamUpdate(features.t, spec.out_address, _clamp(spec.send_on_invalid, lo, hi)))
            continue
        mapped = apply(spec.function, value)
        if not is_pitch(spec.function):
            mapped = lo + mapped * (hi - lo)
        updates.append(ParamUpdate(features.t, spec.out_address, _clamp(mapped, lo, hi)))
    return updates
