"""File-driven replay harness.

Replays a recorded session through the full pipeline with a virtual clock
taken from the frame timestamps, so fast mode is a pure function of
(config, session file): repeated runs produce byte-identical sink output.
Realtime mode additionally sleeps to pace the frames, which changes wall
time but not a single output byte.

Also the latency measurement point: per frame it times parse through
encode (sink I/O and pacing sleeps excluded) and reports the median.
"""

from __future__ import annotations

import statistics
import time
from contextlib import ExitStack
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .config import EngineConfig
from .osc import CaptureWriter, CsvWriter, UdpSender, encode_update
from .pipeline import Pipeline
from .routing import ParamUpdate
from .wire import KEYPOINT_NAMES, PoseFrame, WireError, parse_frame

Sink = Callable[[Sequence[ParamUpdate]], object]


@dataclass
class ReplayStats:
    frames: int = 0
    updates: int = 0
    stale_drops: int = 0
    frame_times_ms: list[float] = field(default_factory=list)

    @property
    def median_ms(self) -> float:
        return statistics.median(self.frame_times_ms) if self.frame_times_ms else 0.0

    @property
    def p95_ms(self) -> float:
        if not self.frame_times_ms:
            return 0.0
        ordered = sorted(self.frame_times_ms)
        return ordered[min(len(ordered) - 1, int(0.95 * len(ordered)))]

    def summary(self) -> str:
        return (
            f"frames={self.frames} updates={self.updates} stale_drops={self.stale_drops} "
            f"median_ms={self.median_ms:.3f} p95_ms={self.p95_ms:.3f}"
        )


def open_sink(selector: str, stack: ExitStack) -> Sink:
    """Resolve a sink selector: udp[:host:port] | capture:<file> | csv:<file>."""
    if selector == "udp" or selector.startswith("udp:"):
        dest = selector[4:] if selector.startswith("udp:") else "127.0.0.1:57120"
        host, _, port = dest.rpartition(":")
        sender = UdpSender(host or "127.0.0.1", int(port))
        stack.callback(sender.close)
        return sender.send
    if selector.startswith("capture:"):
        fp = stack.enter_context(open(selector[len("capture:"):], "wb"))
        return CaptureWriter(fp).write
    if selector.startswith("csv:"):
        fp = stack.enter_context(open(selector[len("csv:"):], "w", encoding="utf-8"))
        return CsvWriter(fp).write
    raise ValueError(f"unknown sink selector {selector!r} (use udp, capture:<file>, csv:<file>)")


def _parse_line(line: str, lineno: int) -> PoseFrame:
    try:
        return parse_frame(line.rstrip("\r\n"))
    except WireError as exc:
        raise WireError(f"line {lineno}: {exc}") from exc


def replay_file(
    config: EngineConfig,
    input_path: str | Path,
    sink: Sink,
    fast: bool = True,
) -> ReplayStats:
    """Feed a session file through the pipeline into a sink.

    Raises WireError (with the line number) on the first unparsable line.
    """
    pipeline = Pipeline(config)
    stats = ReplayStats()
    prev_t: float | None = None
    with open(input_path, "r", encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            t0 = time.perf_counter_ns()
            frame = _parse_line(line, lineno)
            parse_ns = time.perf_counter_ns() - t0
            if not fast and prev_t is not None:
                delta_s = (frame.t - prev_t) / 1000.0
                if delta_s > 0:
                    time.sleep(delta_s)
            t1 = time.perf_counter_ns()
            updates = pipeline.process(frame)
            for update in updates:
                encode_update(update)
            stats.frame_times_ms.append((parse_ns + time.perf_counter_ns() - t1) / 1e6)
            sink(updates)
            prev_t = frame.t
            stats.frames += 1
            stats.updates += len(updates)
    stats.stale_drops = pipeline.stale_drops
    return stats


def collect_speed_samples(
    config: EngineConfig,
    frames: Iterable[PoseFrame],
    points: tuple[str, ...] | None = None,
) -> list[float]:
    """Per-frame maximum body-length speed over the given points (defaults
    to the config's speed-mapped points), for offline calibration."""
    from . import body_frame, kinematics

    if points is None:
        points = tuple(
            spec.source.point for spec in config.mappings if spec.source.feature == "speed"
        ) or ("left_wrist", "right_wrist")
    states = {name: kinematics.PointState() for name in KEYPOINT_NAMES}
    refs = None
    samples: list[float] = []
    last_t = None
    for frame in frames:
        if last_t is not None and frame.t <= last_t:
            continue
        last_t = frame.t
        for name in KEYPOINT_NAMES:
            states[name] = kinematics.update(
                states[name], frame.keypoints.get(name), frame.t, config.smoother
            )
        feats = kinematics.features(states, (), frame.t)
        refs = body_frame.compute_refs(feats, refs, config.strategy.tau_ref)
        if not refs.valid:
            continue
        best = None
        for name in points:
            pf = feats.points.get(name)
            if pf is not None and pf.valid:
                s_bl = body_frame.body_speed(pf.speed, refs)
                best = s_bl if best is None else max(best, s_bl)
        if best is not None:
            samples.append(best)
    return samples
