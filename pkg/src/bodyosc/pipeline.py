"""The per-frame processing pipeline: smooth -> features -> refs ->
normalize -> map -> route.

The pipeline is a deterministic state machine over frame timestamps: no
wall-clock reads, so replaying the same frames always yields the same
updates. One pipeline per performer stream; callers own the ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

from . import body_frame, kinematics
from .body_frame import INVALID_POSITION, NormalizedPosition, body_speed
from .config import EngineConfig
from .kinematics import PointState
from .mapping import calibrate
from .routing import MappingSpec, ParamUpdate, route
from .wire import KEYPOINT_NAMES, PoseFrame


@dataclass
class CalibrationResult:
    ok: bool
    s_max: float
    samples: int
    error: str = ""


class Pipeline:
    def __init__(self, config: EngineConfig):
        self.config = config
        self.smoother = config.smoother
        self.calibration = config.calibration
        self.strategy_kind = config.strategy.kind
        self.preset: str | None = None
        self._specs: tuple[MappingSpec, ...] = config.mappings
        self._states: dict[str, PointState] = {name: PointState() for name in KEYPOINT_NAMES}
        self._refs: body_frame.BodyRefs | None = None
        self._last_t: float | None = None
        self._last_sent: dict[str, float] = {}
        self._outputs: dict[str, float | None] = {}
        self._positions: dict[str, NormalizedPosition] = {}
        self.stale_drops = 0  # frames with non-increasing timestamps
        self._calib_samples: list[float] | None = None
        self._calib_end_t = 0.0
        self._calib_result: CalibrationResult | None = None
        self._refresh_plan()

    # -- configuration surface for live control -------------------------------

    @property
    def specs(self) -> tuple[MappingSpec, ...]:
        return self._specs

    def set_strategy(self, kind: str) -> None:
        if kind not in body_frame.STRATEGY_KINDS:
            raise ValueError(f"unknown strategy {kind!r}")
        self.strategy_kind = kind
        self._refresh_plan()

    def set_threshold(self, c_min: float) -> None:
        self.smoother = replace(self.smoother, c_min=c_min)

    def set_preset(self, name: str) -> None:
        if name not in self.config.presets:
            raise ValueError(f"unknown preset {name!r}")
        self._specs = self.config.presets[name]
        self.preset = name
        self._last_sent.clear()
        self._refresh_plan()

    def start_calibration(self, duration_ms: float = 10_000.0) -> None:
        start = self._last_t if self._last_t is not None else 0.0
        self._calib_samples = []
        self._calib_end_t = start + duration_ms
        self._calib_result = None

    def poll_calibration(self) -> CalibrationResult | None:
        result = self._calib_result
        self._calib_result = None
        return result

    @property
    def calibrating(self) -> bool:
        return self._calib_samples is not None

    def _refresh_plan(self) -> None:
        # Which (strategy kind, point) normalizations each frame needs.
        points: set[str] = set()
        kinds: set[str] = set()
        speed_points: set[str] = set()
        for spec in self._specs:
            src = spec.source
            if src.feature in ("pos_u", "pos_v"):
                points.add(src.point)
                kinds.add(spec.strategy or self.strategy_kind)
            elif src.feature == "speed":
                speed_points.add(src.point)
                points.add(src.point)
            elif src.feature == "rel_speed":
                points.update(src.pair)
        self._norm_kinds = tuple(sorted(kinds))
        self._control_points = tuple(n for n in KEYPOINT_NAMES if n in points)
        self._speed_points = tuple(n for n in KEYPOINT_NAMES if n in speed_points) or (
            "left_wrist",
            "right_wrist",
        )
        pairs = {pair for pair in self.config.pairs}
        pairs.update(spec.source.pair for spec in self._specs if spec.source.feature == "rel_speed")
        self._pairs = tuple(sorted(pairs))

    # -- per-frame processing --------------------------------------------------

    def process(self, frame: PoseFrame) -> list[ParamUpdate]:
        """Run one frame through the pipeline and return the routed updates
        (after optional on-change suppression)."""
        if self._last_t is not None and frame.t <= self._last_t:
            self.stale_drops += 1
            return []
        self._last_t = frame.t

        for name in KEYPOINT_NAMES:
            self._states[name] = kinematics.update(
                self._states[name], frame.keypoints.get(name), frame.t, self.smoother
            )
        feats = kinematics.features(self._states, self._pairs, frame.t)
        self._refs = body_frame.compute_refs(feats, self._refs, self.config.strategy.tau_ref)

        positions: dict[str, dict[str, NormalizedPosition]] = {}
        kinds = set(self._norm_kinds)
        kinds.add(self.strategy_kind)
        for kind in kinds:
            strat = self.config.strategy.get(kind)
            per_point: dict[str, NormalizedPosition] = {}
            for name in self._control_points:
                pf = feats.points.get(name)
                if pf is None or not pf.valid:
                    per_point[name] = INVALID_POSITION
                else:
                    per_point[name] = body_frame.normalize_keypoint(name, pf.p, self._refs, strat)
            positions[kind] = per_point

        updates = route(
            feats,
            positions,
            self._specs,
            refs=self._refs,
            calibration=self.calibration,
            default_strategy=self.strategy_kind,
        )

        self._positions = positions.get(self.strategy_kind, {})
        self._outputs = {spec.id: None for spec in self._specs}
        by_address = {u.address: u.value for u in updates}
        for spec in self._specs:
            if spec.out_address in by_address:
                self._outputs[spec.id] = by_address[spec.out_address]

        if self._calib_samples is not None:
            self._sample_calibration(feats, frame.t)

        if self.config.only_on_change.enabled:
            eps = self.config.only_on_change.epsilon
            kept = []
            for u in updates:
                last = self._last_sent.get(u.address)
                if last is None or abs(u.value - last) > eps:
                    kept.append(u)
                    self._last_sent[u.address] = u.value
            updates = kept
        return updates

    def _sample_calibration(self, feats: kinematics.KinematicFeatures, t: float) -> None:
        if self._refs is not None and self._refs.valid:
            best = None
            for name in self._speed_points:
                pf = feats.points.get(name)
                if pf is not None and pf.valid:
                    s_bl = body_speed(pf.speed, self._refs)
                    best = s_bl if best is None else max(best, s_bl)
            if best is not None:
                self._calib_samples.append(best)
        if t >= self._calib_end_t:
            samples = self._calib_samples
            self._calib_samples = None
            try:
                self.calibration = calibrate(samples, self.config.calibration.percentile)
                self._calib_result = CalibrationResult(True, self.calibration.s_max, len(samples))
            except ValueError as exc:
                self._calib_result = CalibrationResult(
                    False, self.calibration.s_max, len(samples), str(exc)
                )

    # -- telemetry ---------------------------------------------------------------

    def snapshot(self) -> dict[str, Any]:
        points: dict[str, Any] = {}
        for name in self._control_points:
            pos = self._positions.get(name, INVALID_POSITION)
            points[name] = {"valid": pos.valid, "u": pos.u, "v": pos.v}
        return {
            "t": self._last_t,
            "points": points,
            "outputs": dict(self._outputs),
            "state": {
                "strategy": self.strategy_kind,
                "preset": self.preset,
                "s_max": self.calibration.s_max,
                "c_min": self.smoother.c_min,
                "calibration": "sampling" if self.calibrating else "idle",
            },
        }
