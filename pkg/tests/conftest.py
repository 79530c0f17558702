from __future__ import annotations

import hypothesis.strategies as st
from hypothesis import settings

from bodyosc.wire import KEYPOINT_NAMES, PoseFrame, RawKeypoint

# Module invariants run as property tests with >= 1000 randomized cases.
settings.register_profile("thorough", max_examples=1000, deadline=None)
settings.load_profile("thorough")

unit_floats = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
timestamps = st.floats(min_value=0.0, max_value=1e12, allow_nan=False, allow_infinity=False)


@st.composite
def keypoints(draw, name: str | None = None) -> RawKeypoint:
    kp_name = name if name is not None else draw(st.sampled_from(KEYPOINT_NAMES))
    return RawKeypoint(kp_name, draw(unit_floats), draw(unit_floats), draw(unit_floats))


@st.composite
def pose_frames(draw) -> PoseFrame:
    names = draw(st.lists(st.sampled_from(KEYPOINT_NAMES), unique=True))
    return PoseFrame(draw(timestamps), {name: draw(keypoints(name)) for name in names})


def make_frame(t: float, points: dict[str, tuple[float, float]], confidence: float = 0.9) -> PoseFrame:
    return PoseFrame(
        float(t),
        {name: RawKeypoint(name, x, y, confidence) for name, (x, y) in points.items()},
    )


# A straight-on pose: performer facing the camera, so the right shoulder is
# on the image left (smaller x) and the facing sign is negative.
FACING_POSE = {
    "right_shoulder": (0.40, 0.35),
    "left_shoulder": (0.60, 0.35),
    "right_hip": (0.42, 0.62),
    "left_hip": (0.58, 0.62),
    "right_wrist": (0.30, 0.40),
    "left_wrist": (0.70, 0.40),
    "right_ankle": (0.43, 0.90),
    "left_ankle": (0.57, 0.90),
}
