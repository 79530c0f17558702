#!/usr/bin/env python3
"""Generate the bundled synthetic session: 10 seconds at 30 fps of a
performer waving the right wrist (amplitude gesture) and circling the left,
with seeded tracker jitter and a few confidence dropouts.

The output is deterministic; the copy under data/sessions/ is committed so
replay-determinism tests have a fixed input.
"""

from __future__ import annotations

import argparse
import math
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from bodyosc.wire import PoseFrame, RawKeypoint, record_session  # noqa: E402

# Performer facing the camera, un-mirrored: the anatomical right side sits
# at smaller image x.
BASE = {
    "nose": (0.50, 0.22),
    "right_shoulder": (0.40, 0.35),
    "left_shoulder": (0.60, 0.35),
    "right_elbow": (0.36, 0.48),
    "left_elbow": (0.64, 0.48),
    "right_hip": (0.43, 0.62),
    "left_hip": (0.57, 0.62),
    "right_knee": (0.43, 0.78),
    "left_knee": (0.57, 0.78),
    "right_ankle": (0.43, 0.92),
    "left_ankle": (0.57, 0.92),
}


def frame_at(k: int, rng: random.Random) -> PoseFrame:
    t_ms = k * (1000.0 / 30.0)
    t_s = t_ms / 1000.0
    points = dict(BASE)
    # Right wrist: wide horizontal wave, outward is -x for this facing.
    wave = 0.5 + 0.5 * math.sin(2.0 * math.pi * 0.4 * t_s)
    points["right_wrist"] = (0.40 - 0.28 * wave, 0.42 - 0.25 * math.sin(2.0 * math.pi * 0.2 * t_s))
    # Left wrist: slow circle around the shoulder.
    points["left_wrist"] = (
        0.60 + 0.12 * math.cos(2.0 * math.pi * 0.15 * t_s),
        0.42 + 0.12 * math.sin(2.0 * math.pi * 0.15 * t_s),
    )
    keypoints = {}
    for name, (x, y) in points.items():
        jx = x + rng.gauss(0.0, 0.002)
        jy = y + rng.gauss(0.0, 0.002)
        confidence = min(1.0, max(0.0, rng.gauss(0.9, 0.04)))
        # Occasional tracker dropout on the busy hand.
        if name == "right_wrist" and k % 97 in (0, 1) and k > 0:
            confidence = 0.1
        keypoints[name] = RawKeypoint(
            name, min(max(jx, 0.0), 1.0), min(max(jy, 0.0), 1.0), confidence
        )
    return PoseFrame(t_ms, keypoints)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="data/sessions/synthetic_10s_30fps.jsonl")
    parser.add_argument("--seconds", type=float, default=10.0)
    parser.add_argument("--fps", type=float, default=30.0)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    n = int(args.seconds * args.fps)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fp:
        result = record_session((frame_at(k, rng) for k in range(n)), fp)
    print(f"wrote {result.written} frames to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
