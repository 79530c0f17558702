"""Per-point position smoothing, velocity estimation, and relative velocities.

Each tracked point carries the feature set: smoothed position, velocity,
speed, and the relative velocity against each configured partner point.
Positions are smoothed with time-corrected exponential smoothing
(alpha = 1 - exp(-dt/tau)) so jittery frame intervals do not change the
effective cutoff; velocity is the backward difference of the smoothed
positions, which keeps camera noise out of the derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .wire import RawKeypoint

Vec2 = tuple[float, float]

DEFAULT_PAIRS: tuple[tuple[str, str], ...] = (
    ("left_wrist", "right_wrist"),
    ("left_ankle", "right_ankle"),
)


@dataclass(frozen=True)
class SmootherConfig:
    tau: float = 80.0  # ms; 0 pins alpha to 1 (smoothing off)
    c_min: float = 0.3
    t_hold: float = 300.0  # ms a point survives without an observation

    def __post_init__(self) -> None:
        if self.tau < 0.0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if not 0.0 <= self.c_min <= 1.0:
            raise ValueError(f"c_min must be in [0,1], got {self.c_min}")
        if self.t_hold < 0.0:
            raise ValueError(f"t_hold must be >= 0, got {self.t_hold}")


@dataclass(frozen=True)
class PointState:
    p_hat: Vec2 | None = None
    v: Vec2 = (0.0, 0.0)
    last_seen_t: float = 0.0
    last_t: float | None = None  # time of the last update call
    valid: bool = False


def smoothing_alpha(dt_ms: float, tau_ms: float) -> float:
    if tau_ms <= 0.0:
        return 1.0
    return 1.0 - math.exp(-dt_ms / tau_ms)


def update(state: PointState, obs: RawKeypoint | None, t: float, cfg: SmootherConfig) -> PointState:
    """Advance one point's state to frame time t.

    With a confident observation the position is smoothed and velocity taken
    by backward difference. Without one the position holds, velocity decays
    by exp(-dt/tau), and the point goes invalid once unseen for t_hold.
    """
    if state.last_t is not None and t <= state.last_t:
        raise ValueError(f"non-increasing timestamp: {t} after {state.last_t}")
    seen = obs is not None and obs.confidence >= cfg.c_min

    if seen and (state.p_hat is None or not state.valid):
        # First observation, or reacquired after the hold expired: seed fresh
        # so a stale held position cannot produce a velocity spike.
        return PointState(p_hat=(obs.x, obs.y), v=(0.0, 0.0), last_seen_t=t, last_t=t, valid=True)

    if seen:
        dt_ms = t - state.last_t
        alpha = smoothing_alpha(dt_ms, cfg.tau)
        px, py = state.p_hat
        if alpha >= 1.0:
            nx, ny = obs.x, obs.y
        else:
            # Increment form, clamped so p_hat never leaves the hull of the
            # observations even at the last ulp.
            nx = px + alpha * (obs.x - px)
            ny = py + alpha * (obs.y - py)
            nx = min(max(nx, min(px, obs.x)), max(px, obs.x))
            ny = min(max(ny, min(py, obs.y)), max(py, obs.y))
        dt_s = dt_ms / 1000.0
        v = ((nx - px) / dt_s, (ny - py) / dt_s)
        return PointState(p_hat=(nx, ny), v=v, last_seen_t=t, last_t=t, valid=True)

    if state.p_hat is None:
        return PointState(last_t=t)

    dt_ms = t - state.last_t
    decay = 0.0 if cfg.tau <= 0.0 else math.exp(-dt_ms / cfg.tau)
    v = (state.v[0] * decay, state.v[1] * decay)
    valid = (t - state.last_seen_t) <= cfg.t_hold
    return PointState(p_hat=state.p_hat, v=v, last_seen_t=state.last_seen_t, last_t=t, valid=valid)


@dataclass(frozen=True)
class PointFeatures:
    p: Vec2
    v: Vec2
    speed: float  # units/second, always >= 0
    valid: bool


@dataclass(frozen=True)
class RelVelocity:
    v: Vec2
    speed: float
    valid: bool


@dataclass(frozen=True)
class KinematicFeatures:
    t: float
    points: dict[str, PointFeatures]
    rel: dict[tuple[str, str], RelVelocity]

    def rel_velocity(self, a: str, b: str) -> RelVelocity | None:
        got = self.rel.get((a, b))
        if got is not None:
            return got
        rev = self.rel.get((b, a))
        if rev is not None:
            # Exact antisymmetry: negation, not recomputation.
            return RelVelocity((-rev.v[0], -rev.v[1]), rev.speed, rev.valid)
        return None


def features(
    states: Mapping[str, PointState],
    pairs: Sequence[tuple[str, str]],
    t: float,
) -> KinematicFeatures:
    """Assemble the per-point feature set at a common frame time.

    Pairs involving a point that is invalid (or never seen) are marked
    invalid rather than dropped, so downstream consumers see a stable shape.
    """
    points: dict[str, PointFeatures] = {}
    for name, state in states.items():
        if state.p_hat is None:
            continue
        points[name] = PointFeatures(
            p=state.p_hat,
            v=state.v,
            speed=math.hypot(state.v[0], state.v[1]),
            valid=state.valid,
        )
    rel: dict[tuple[str, str], RelVelocity] = {}
    for a, b in pairs:
        fa = points.get(a)
        fb = points.get(b)
        if fa is None or fb is None:
            rel[(a, b)] = RelVelocity((0.0, 0.0), 0.0, False)
            continue
        rv = (fa.v[0] - fb.v[0], fa.v[1] - fb.v[1])
        rel[(a, b)] = RelVelocity(rv, math.hypot(rv[0], rv[1]), fa.valid and fb.valid)
    return KinematicFeatures(t=t, points=points, rel=rel)
