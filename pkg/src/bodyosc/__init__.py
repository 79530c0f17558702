"""bodyosc: streamed 2D body keypoints in, OSC sound-control messages out.

Pipeline stages: wire parsing -> per-point smoothing and velocities ->
body-relative normalization -> perceptually motivated mapping functions ->
OSC routing over UDP. Deterministic record/replay included.
"""

from .body_frame import (
    BodyRefs,
    BodyScaled,
    CameraCenter,
    NormalizedPosition,
    ReferenceStrategy,
    ShoulderAnchor,
    body_speed,
    compute_refs,
    normalize_body_scaled,
    normalize_camera_center,
    normalize_keypoint,
    normalize_shoulder_anchor,
)
from .config import ConfigError, EngineConfig, default_config, load_config
from .kinematics import (
    KinematicFeatures,
    PointState,
    SmootherConfig,
    features,
    update,
)
from .mapping import (
    ExpDb,
    ExpNorm,
    JndReport,
    Linear,
    MappingFn,
    PitchExp,
    SpeedCalibration,
    calibrate,
    jnd_analyze,
    map_exp_db,
    map_exp_norm,
    map_linear,
    map_pitch,
    normalize_speed,
)
from .osc import OscAddressError, UdpSender, encode_message, encode_update
from .pipeline import Pipeline
from .routing import MappingSpec, ParamUpdate, Source, route
from .wire import (
    KEYPOINT_NAMES,
    PoseFrame,
    RawKeypoint,
    WireError,
    parse_frame,
    record_session,
    replay_session,
    serialize_frame,
)

__version__ = "0.1.0"
