"""Keypoint wire schema: frame parsing, canonical serialization, session files.

One wire record per line (or per socket text message):

    {"t": <milliseconds>, "kp": {"<keypoint_name>": [<x>, <y>, <confidence>], ...}}

Coordinates are normalized image space: x in [0,1] left-to-right, y in [0,1]
top-to-bottom. Session files are UTF-8 newline-delimited records (.jsonl).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

# COCO 17-keypoint convention, in canonical serialization order.
KEYPOINT_NAMES: tuple[str, ...] = (
    "nose",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
)
KEYPOINT_ORDER: dict[str, int] = {name: i for i, name in enumerate(KEYPOINT_NAMES)}


class WireError(ValueError):
    """A record violates the wire schema."""


@dataclass(frozen=True)
class RawKeypoint:
    name: str
    x: float
    y: float
    confidence: float

    def __post_init__(self) -> None:
        if self.name not in KEYPOINT_ORDER:
            raise ValueError(f"unknown keypoint name {self.name!r}")
        for label, value in (("x", self.x), ("y", self.y), ("confidence", self.confidence)):
            if not (isinstance(value, float) and 0.0 <= value <= 1.0):
                raise ValueError(f"{self.name}.{label} out of range [0,1]: {value!r}")


@dataclass(frozen=True)
class PoseFrame:
    t: float  # milliseconds; non-decreasing within a session
    keypoints: dict[str, RawKeypoint] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (isinstance(self.t, float) and math.isfinite(self.t)):
            raise ValueError(f"timestamp must be a finite number, got {self.t!r}")
        for name, kp in self.keypoints.items():
            if kp.name != name:
                raise ValueError(f"keypoint stored under {name!r} is named {kp.name!r}")


def _no_duplicate_keys(pairs: list[tuple[str, object]]) -> dict:
    out: dict = {}
    for key, value in pairs:
        if key in out:
            raise WireError(f"duplicate key {key!r}")
        out[key] = value
    return out


def parse_frame(text: str) -> PoseFrame:
    """Parse one wire record into a PoseFrame.

    Raises WireError on malformed records, unknown keypoint names,
    out-of-range values, or a missing timestamp.
    """
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except WireError:
        raise
    except json.JSONDecodeError as exc:
        raise WireError(f"malformed record: {exc}") from exc
    return frame_from_doc(doc)


def frame_from_doc(doc: object) -> PoseFrame:
    """Build a PoseFrame from an already-parsed wire document."""
    if not isinstance(doc, dict):
        raise WireError("record must be a JSON object")
    if "t" not in doc:
        raise WireError("missing timestamp 't'")
    t = doc["t"]
    if isinstance(t, bool) or not isinstance(t, (int, float)) or not math.isfinite(t):
        raise WireError(f"'t' must be a finite number, got {t!r}")
    kp_doc = doc.get("kp")
    if not isinstance(kp_doc, dict):
        raise WireError("missing or non-object 'kp' field")

    keypoints: dict[str, RawKeypoint] = {}
    for name, triple in kp_doc.items():
        if name not in KEYPOINT_ORDER:
            raise WireError(f"unknown keypoint name {name!r}")
        if (
            not isinstance(triple, list)
            or len(triple) != 3
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in triple)
        ):
            raise WireError(f"keypoint {name!r} must be [x, y, confidence]")
        try:
            keypoints[name] = RawKeypoint(name, float(triple[0]), float(triple[1]), float(triple[2]))
        except ValueError as exc:
            raise WireError(str(exc)) from exc
    return PoseFrame(float(t), keypoints)


def _wire_number(x: float):
    # Shortest round-trip form: integral floats render without the ".0".
    if math.isfinite(x) and abs(x) < 2**53 and x == int(x):
        return int(x)
    return x


def serialize_frame(frame: PoseFrame) -> str:
    """Canonical wire record: fixed keypoint order, shortest number forms."""
    kp: dict[str, list] = {}
    for name in KEYPOINT_NAMES:
        point = frame.keypoints.get(name)
        if point is not None:
            kp[name] = [_wire_number(point.x), _wire_number(point.y), _wire_number(point.confidence)]
    return json.dumps({"t": _wire_number(frame.t), "kp": kp}, separators=(",", ":"))


@dataclass
class RecordResult:
    written: int = 0
    regressions: int = 0


def record_session(frames: Iterable[PoseFrame], sink: IO[str]) -> RecordResult:
    """Append one canonical record per line; frames whose timestamp goes
    backwards are rejected and counted, never reordered."""
    result = RecordResult()
    last_t: float | None = None
    for frame in frames:
        if last_t is not None and frame.t < last_t:
            result.regressions += 1
            continue
        sink.write(serialize_frame(frame) + "\n")
        last_t = frame.t
        result.written += 1
    return result


def replay_session(source: Iterable[str], mode: str = "fast") -> Iterator[PoseFrame]:
    """Yield frames from a session file in order.

    mode="realtime" sleeps to honor inter-frame timestamp deltas;
    mode="fast" yields without delay. The frames are identical either way.
    Any unparsable line aborts with its line number.
    """
    if mode not in ("fast", "realtime"):
        raise ValueError(f"unknown replay mode {mode!r}")
    prev_t: float | None = None
    for lineno, line in enumerate(source, start=1):
        try:
            frame = parse_frame(line.rstrip("\r\n"))
        except WireError as exc:
            raise WireError(f"line {lineno}: {exc}") from exc
        if mode == "realtime" and prev_t is not None:
            delta_s = (frame.t - prev_t) / 1000.0
            if delta_s > 0:
                time.sleep(delta_s)
        prev_t = frame.t
        yield frame
