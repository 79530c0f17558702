"""Body-relative reference frames for control points.

Three reference strategies convert a tracked point into (u, v) in [0,1]^2:

* CameraCenter: the image itself is the frame (u = x, v = 1 - y).
* ShoulderAnchor: offset from the same-side shoulder divided by a fixed
  arm length. Simple, but the scale breaks as soon as the performer moves
  toward or away from the camera.
* BodyScaled: offset from the same-side shoulder divided by live body
  distances (shoulder-to-shoulder horizontally, shoulder-to-hip
  vertically), which makes the coordinates invariant to the performer's
  distance from the camera. Horizontal range is 2.0 reference distances
  outward and 1.5 inward; vertical defaults to 1.5 each way.

"Outward" is resolved through the facing sign (sign of the right-minus-left
shoulder x difference) so mirrored webcams behave identically. Lower-body
points anchor at the same-side hip instead of the shoulder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kinematics import KinematicFeatures, Vec2, smoothing_alpha

# Below this the reference distances cannot be trusted (performer sideways
# or tracker glitch); outputs go invalid instead of dividing.
DEGENERATE_DISTANCE = 1e-6

LOWER_BODY = frozenset(
    {"left_hip", "right_hip", "left_knee", "right_knee", "left_ankle", "right_ankle"}
)


@dataclass(frozen=True)
class CameraCenter:
    """Fixed view-center reference (kept for comparison; no body scaling)."""


@dataclass(frozen=True)
class ShoulderAnchor:
    arm_length: float = 0.35  # normalized image units

    def __post_init__(self) -> None:
        if self.arm_length <= 0.0:
            raise ValueError(f"arm_length must be > 0, got {self.arm_length}")


@dataclass(frozen=True)
class BodyScaled:
    out_mult: float = 2.0
    in_mult: float = 1.5
    v_up_mult: float = 1.5
    v_down_mult: float = 1.5

    def __post_init__(self) -> None:
        for label, value in (
            ("out_mult", self.out_mult),
            ("in_mult", self.in_mult),
            ("v_up_mult", self.v_up_mult),
            ("v_down_mult", self.v_down_mult),
        ):
            if value <= 0.0:
                raise ValueError(f"{label} must be > 0, got {value}")


ReferenceStrategy = CameraCenter | ShoulderAnchor | BodyScaled

STRATEGY_KINDS = ("camera_center", "shoulder_anchor", "body_scaled")


def strategy_kind(strat: ReferenceStrategy) -> str:
    if isinstance(strat, CameraCenter):
        return "camera_center"
    if isinstance(strat, ShoulderAnchor):
        return "shoulder_anchor"
    return "body_scaled"


@dataclass(frozen=True)
class SideRefs:
    shoulder: Vec2 | None
    hip: Vec2 | None
    shoulder_valid: bool
    hip_valid: bool
    d_sh: float  # smoothed same-side shoulder-to-hip distance
    valid: bool  # shoulder and hip tracked, d_sh non-degenerate


@dataclass(frozen=True)
class BodyRefs:
    t: float
    d_ss: float  # smoothed shoulder-to-shoulder distance
    sgn: float  # +1 if right shoulder has the larger image x, else -1
    valid: bool  # both shoulders tracked, d_ss non-degenerate
    left: SideRefs
    right: SideRefs

    def side(self, side: str) -> SideRefs:
        return self.right if side == "right" else self.left


def _smoothed(prev: float, raw: float | None, alpha: float) -> float:
    if raw is None:
        return prev
    if prev <= 0.0:
        return raw
    return prev + alpha * (raw - prev)


def compute_refs(
    features: KinematicFeatures,
    prev: BodyRefs | None,
    tau_ref: float = 500.0,
) -> BodyRefs:
    """Update the smoothed body reference distances from the current features.

    The distances smooth with a heavier time constant than positions: body
    size changes slowly, and jitter in a denominator multiplies noise.
    Missing shoulders or hips mark the affected side invalid; a degenerate
    shoulder distance marks the whole result invalid.
    """
    t = features.t
    alpha = 1.0 if prev is None else smoothing_alpha(t - prev.t, tau_ref)

    ls = features.points.get("left_shoulder")
    rs = features.points.get("right_shoulder")
    pair_ok = ls is not None and rs is not None and ls.valid and rs.valid
    raw_d_ss = math.hypot(rs.p[0] - ls.p[0], rs.p[1] - ls.p[1]) if pair_ok else None
    d_ss = _smoothed(prev.d_ss if prev is not None else 0.0, raw_d_ss, alpha)

    if pair_ok:
        sgn = 1.0 if rs.p[0] >= ls.p[0] else -1.0
    else:
        sgn = prev.sgn if prev is not None else 1.0

    sides: dict[str, SideRefs] = {}
    for side in ("left", "right"):
        sh = features.points.get(f"{side}_shoulder")
        hp = features.points.get(f"{side}_hip")
        sh_ok = sh is not None and sh.valid
        hp_ok = hp is not None and hp.valid
        raw_d_sh = (
            math.hypot(sh.p[0] - hp.p[0], sh.p[1] - hp.p[1]) if sh_ok and hp_ok else None
        )
        prev_side = prev.side(side) if prev is not None else None
        d_sh = _smoothed(prev_side.d_sh if prev_side is not None else 0.0, raw_d_sh, alpha)
        sides[side] = SideRefs(
            shoulder=sh.p if sh is not None else None,
            hip=hp.p if hp is not None else None,
            shoulder_valid=sh_ok,
            hip_valid=hp_ok,
            d_sh=d_sh,
            valid=sh_ok and hp_ok and d_sh > DEGENERATE_DISTANCE,
        )

    return BodyRefs(
        t=t,
        d_ss=d_ss,
        sgn=sgn,
        valid=pair_ok and d_ss > DEGENERATE_DISTANCE,
        left=sides["left"],
        right=sides["right"],
    )


@dataclass(frozen=True)
class NormalizedPosition:
    u: float
    v: float
    raw_u: float  # unclamped offset in reference-distance units, + = outward
    raw_v: float  # unclamped offset, + = above the anchor
    valid: bool = True


INVALID_POSITION = NormalizedPosition(0.0, 0.0, 0.0, 0.0, valid=False)


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo), hi)


def _outward_sign(side: str, sgn: float) -> float:
    return sgn if side == "right" else -sgn


def normalize_body_scaled(
    point: Vec2,
    side: str,
    refs: BodyRefs,
    strat: BodyScaled,
    anchor: str = "shoulder",
) -> NormalizedPosition:
    """Body-scaled (u, v): horizontal offset in shoulder-widths from the
    same-side anchor, vertical offset in shoulder-to-hip lengths.

    u = 0 at in_mult reference distances inward, u = 1 at out_mult outward;
    v = 0 at v_down_mult below the anchor, v = 1 at v_up_mult above.
    """
    side_refs = refs.side(side)
    anchor_pos = side_refs.shoulder if anchor == "shoulder" else side_refs.hip
    anchor_ok = side_refs.shoulder_valid if anchor == "shoulder" else side_refs.hip_valid
    if not (refs.valid and side_refs.valid and anchor_ok and anchor_pos is not None):
        return INVALID_POSITION
    raw_u = _outward_sign(side, refs.sgn) * (point[0] - anchor_pos[0]) / refs.d_ss
    u = (_clamp(raw_u, -strat.in_mult, strat.out_mult) + strat.in_mult) / (
        strat.in_mult + strat.out_mult
    )
    raw_v = (anchor_pos[1] - point[1]) / side_refs.d_sh
    v = (_clamp(raw_v, -strat.v_down_mult, strat.v_up_mult) + strat.v_down_mult) / (
        strat.v_down_mult + strat.v_up_mult
    )
    return NormalizedPosition(u, v, raw_u, raw_v)


def normalize_shoulder_anchor(
    point: Vec2,
    side: str,
    refs: BodyRefs,
    strat: ShoulderAnchor,
    anchor: str = "shoulder",
) -> NormalizedPosition:
    """Anchor-relative (u, v) against a fixed arm length: u = 0 one arm
    inward, 0.5 at the anchor, 1 one arm outward; v likewise about the
    anchor height."""
    side_refs = refs.side(side)
    anchor_pos = side_refs.shoulder if anchor == "shoulder" else side_refs.hip
    anchor_ok = side_refs.shoulder_valid if anchor == "shoulder" else side_refs.hip_valid
    if not (refs.valid and anchor_ok and anchor_pos is not None):
        return INVALID_POSITION
    raw_u = _outward_sign(side, refs.sgn) * (point[0] - anchor_pos[0]) / strat.arm_length
    raw_v = (anchor_pos[1] - point[1]) / strat.arm_length
    u = (_clamp(raw_u, -1.0, 1.0) + 1.0) / 2.0
    v = (_clamp(raw_v, -1.0, 1.0) + 1.0) / 2.0
    return NormalizedPosition(u, v, raw_u, raw_v)


def normalize_camera_center(point: Vec2) -> NormalizedPosition:
    """View-frame (u, v): the image abscissa is already the horizontal ratio
    (center 0.5 = the reference); v flips y so larger means higher."""
    raw_u = point[0]
    raw_v = 1.0 - point[1]
    return NormalizedPosition(_clamp(raw_u, 0.0, 1.0), _clamp(raw_v, 0.0, 1.0), raw_u, raw_v)


def side_of(name: str) -> str:
    if name.startswith("left_"):
        return "left"
    return "right"


def normalize_keypoint(
    name: str,
    point: Vec2,
    refs: BodyRefs,
    strat: ReferenceStrategy,
) -> NormalizedPosition:
    """Normalize a named keypoint under the given strategy. Wrists and other
    upper-body points anchor at the same-side shoulder; lower-body points
    anchor at the same-side hip."""
    if isinstance(strat, CameraCenter):
        return normalize_camera_center(point)
    side = side_of(name)
    anchor = "hip" if name in LOWER_BODY else "shoulder"
    if isinstance(strat, BodyScaled):
        return normalize_body_scaled(point, side, refs, strat, anchor=anchor)
    return normalize_shoulder_anchor(point, side, refs, strat, anchor=anchor)


def body_speed(s_abs: float, refs: BodyRefs) -> float:
    """Speed in body-lengths per second: image-space speed over the
    shoulder-to-shoulder distance. Scale-invariant, so the same physical
    motion reads identically at any camera distance."""
    if not refs.valid:
        raise ValueError("body refs are invalid")
    return s_abs / refs.d_ss
