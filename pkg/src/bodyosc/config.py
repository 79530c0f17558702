"""Engine configuration: YAML file loading with defaulting and validation.

Every validation failure is reported with a path into the document
(e.g. "mappings[1].out_range: lo must be < hi"); all failures are
collected before raising so one round trip fixes a config.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .body_frame import STRATEGY_KINDS, BodyScaled, CameraCenter, ReferenceStrategy, ShoulderAnchor
from .kinematics import DEFAULT_PAIRS, SmootherConfig
from .mapping import ExpDb, ExpNorm, Linear, MappingFn, PitchExp, SpeedCalibration
from .routing import AUTO, MappingSpec, Source
from .wire import KEYPOINT_ORDER


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("invalid configuration:\n  " + "\n  ".join(errors))


@dataclass(frozen=True)
class StrategyConfig:
    kind: str = "body_scaled"
    body_scaled: BodyScaled = field(default_factory=BodyScaled)
    shoulder_anchor: ShoulderAnchor = field(default_factory=ShoulderAnchor)
    camera_center: CameraCenter = field(default_factory=CameraCenter)
    tau_ref: float = 500.0  # ms; reference distances smooth harder than positions

    def get(self, kind: str) -> ReferenceStrategy:
        return {
            "body_scaled": self.body_scaled,
            "shoulder_anchor": self.shoulder_anchor,
            "camera_center": self.camera_center,
        }[kind]


@dataclass(frozen=True)
class OnlyOnChange:
    enabled: bool = False
    epsilon: float = 1e-4


@dataclass(frozen=True)
class EngineConfig:
    listen: str = "ws://127.0.0.1:9000"
    osc_out: str = "127.0.0.1:57120"
    strategy: StrategyConfig = field(default_factory=StrategyConfig)
    smoother: SmootherConfig = field(default_factory=SmootherConfig)
    calibration: SpeedCalibration = field(default_factory=SpeedCalibration)
    mappings: tuple[MappingSpec, ...] = ()
    presets: dict[str, tuple[MappingSpec, ...]] = field(default_factory=dict)
    pairs: tuple[tuple[str, str], ...] = DEFAULT_PAIRS
    telemetry_rate: float = 30.0
    only_on_change: OnlyOnChange = field(default_factory=OnlyOnChange)

    def listen_host_port(self) -> tuple[str, int]:
        return _host_port(self.listen.removeprefix("ws://"))

    def osc_host_port(self) -> tuple[str, int]:
        return _host_port(self.osc_out)


def _host_port(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    return host or "127.0.0.1", int(port)


class _Walker:
    """Pulls typed values out of nested dicts, recording errors by path."""

    def __init__(self) -> None:
        self.errors: list[str] = []

    def fail(self, path: str, message: str) -> None:
        self.errors.append(f"{path}: {message}")

    def mapping(self, doc: Any, path: str) -> dict:
        if doc is None:
            return {}
        if not isinstance(doc, dict):
            self.fail(path, f"expected a mapping, got {type(doc).__name__}")
            return {}
        return doc

    def reject_unknown(self, doc: dict, known: tuple[str, ...], path: str) -> None:
        for key in doc:
            if key not in known:
                self.fail(f"{path}.{key}" if path else str(key), "unknown key")

    def number(self, doc: dict, key: str, default: float, path: str) -> float:
        value = doc.get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(f"{path}.{key}", f"expected a number, got {value!r}")
            return default
        return float(value)

    def boolean(self, doc: dict, key: str, default: bool, path: str) -> bool:
        value = doc.get(key, default)
        if not isinstance(value, bool):
            self.fail(f"{path}.{key}", f"expected a boolean, got {value!r}")
            return default
        return value

    def string(self, doc: dict, key: str, default: str, path: str) -> str:
        value = doc.get(key, default)
        if not isinstance(value, str):
            self.fail(f"{path}.{key}", f"expected a string, got {value!r}")
            return default
        return value


def _parse_function(doc: Any, path: str, w: _Walker) -> MappingFn:
    doc = w.mapping(doc, path)
    kind = w.string(doc, "kind", "exp_db", path)
    try:
        if kind == "linear":
            w.reject_unknown(doc, ("kind",), path)
            return Linear()
        if kind == "exp_db":
            w.reject_unknown(doc, ("kind", "db_floor", "gate"), path)
            return ExpDb(
                db_floor=w.number(doc, "db_floor", -60.0, path),
                gate=w.number(doc, "gate", 0.02, path),
            )
        if kind == "exp_norm":
            w.reject_unknown(doc, ("kind", "k"), path)
            return ExpNorm(k=w.number(doc, "k", 4.0, path))
        if kind == "pitch_exp":
            w.reject_unknown(doc, ("kind", "f0", "octaves"), path)
            return PitchExp(
                f0=w.number(doc, "f0", 220.0, path),
                octaves=w.number(doc, "octaves", 2.0, path),
            )
    except ValueError as exc:
        w.fail(path, str(exc))
        return Linear()
    w.fail(f"{path}.kind", f"unknown mapping function {kind!r}")
    return Linear()


def _parse_source(doc: Any, path: str, w: _Walker) -> Source:
    doc = w.mapping(doc, path)
    w.reject_unknown(doc, ("point", "feature", "pair"), path)
    feature = w.string(doc, "feature", "speed", path)
    point = w.string(doc, "point", "", path)
    pair_doc = doc.get("pair")
    pair: tuple[str, str] | None = None
    if pair_doc is not None:
        if (
            not isinstance(pair_doc, (list, tuple))
            or len(pair_doc) != 2
            or not all(isinstance(p, str) for p in pair_doc)
        ):
            w.fail(f"{path}.pair", "expected a pair of keypoint names")
        else:
            pair = (pair_doc[0], pair_doc[1])
    try:
        return Source(feature=feature, point=point, pair=pair)
    except ValueError as exc:
        w.fail(path, str(exc))
        return Source(feature="speed", point="right_wrist")


def _parse_mapping(doc: Any, path: str, w: _Walker) -> MappingSpec | None:
    doc = w.mapping(doc, path)
    w.reject_unknown(
        doc,
        ("id", "source", "function", "out_address", "out_range", "strategy", "send_on_invalid"),
        path,
    )
    spec_id = w.string(doc, "id", "", path)
    label = f"{path} (id={spec_id!r})" if spec_id else path
    source = _parse_source(doc.get("source"), f"{label}.source", w)
    function = _parse_function(doc.get("function"), f"{label}.function", w)
    address = w.string(doc, "out_address", "/", label)
    range_doc = doc.get("out_range", [0.0, 1.0])
    if (
        not isinstance(range_doc, (list, tuple))
        or len(range_doc) != 2
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in range_doc)
    ):
        w.fail(f"{label}.out_range", "expected [lo, hi]")
        range_doc = [0.0, 1.0]
    strategy = doc.get("strategy")
    if strategy is not None and strategy not in STRATEGY_KINDS:
        w.fail(f"{label}.strategy", f"unknown strategy {strategy!r}")
        strategy = None
    send_on_invalid = doc.get("send_on_invalid", AUTO)
    if send_on_invalid is not AUTO and send_on_invalid is not None:
        if isinstance(send_on_invalid, bool) or not isinstance(send_on_invalid, (int, float)):
            w.fail(f"{label}.send_on_invalid", f"expected a number or null, got {send_on_invalid!r}")
            send_on_invalid = AUTO
    try:
        return MappingSpec(
            id=spec_id,
            source=source,
            function=function,
            out_address=address,
            out_range=(float(range_doc[0]), float(range_doc[1])),
            strategy=strategy,
            send_on_invalid=send_on_invalid,
        )
    except ValueError as exc:
        w.fail(label, str(exc))
        return None


def _parse_mapping_list(doc: Any, path: str, w: _Walker) -> tuple[MappingSpec, ...]:
    if not isinstance(doc, list):
        w.fail(path, "expected a list of mappings")
        return ()
    specs = []
    for i, entry in enumerate(doc):
        spec = _parse_mapping(entry, f"{path}[{i}]", w)
        if spec is not None:
            specs.append(spec)
    return tuple(specs)


_TOP_KEYS = (
    "listen",
    "osc_out",
    "strategy",
    "smoother",
    "calibration",
    "mappings",
    "presets",
    "pairs",
    "telemetry_rate",
    "only_on_change",
)


def parse_config(doc: Any) -> EngineConfig:
    """Build a validated EngineConfig from a parsed document, filling
    defaults for everything absent."""
    w = _Walker()
    doc = w.mapping(doc, "<root>")
    w.reject_unknown(doc, _TOP_KEYS, "")

    listen = w.string(doc, "listen", "ws://127.0.0.1:9000", "<root>")
    osc_out = w.string(doc, "osc_out", "127.0.0.1:57120", "<root>")
    for label, endpoint in (("listen", listen), ("osc_out", osc_out)):
        try:
            _host_port(endpoint.removeprefix("ws://"))
        except ValueError:
            w.fail(label, f"expected host:port, got {endpoint!r}")

    strat_doc = w.mapping(doc.get("strategy"), "strategy")
    w.reject_unknown(
        strat_doc, ("kind", "tau_ref", "body_scaled", "shoulder_anchor", "camera_center"), "strategy"
    )
    kind = w.string(strat_doc, "kind", "body_scaled", "strategy")
    if kind not in STRATEGY_KINDS:
        w.fail("strategy.kind", f"unknown strategy {kind!r}")
        kind = "body_scaled"
    tau_ref = w.number(strat_doc, "tau_ref", 500.0, "strategy")
    if tau_ref < 0:
        w.fail("strategy.tau_ref", "must be >= 0")
        tau_ref = 500.0
    bs_doc = w.mapping(strat_doc.get("body_scaled"), "strategy.body_scaled")
    w.reject_unknown(bs_doc, ("out_mult", "in_mult", "v_up_mult", "v_down_mult"), "strategy.body_scaled")
    sa_doc = w.mapping(strat_doc.get("shoulder_anchor"), "strategy.shoulder_anchor")
    w.reject_unknown(sa_doc, ("arm_length",), "strategy.shoulder_anchor")
    try:
        body_scaled = BodyScaled(
            out_mult=w.number(bs_doc, "out_mult", 2.0, "strategy.body_scaled"),
            in_mult=w.number(bs_doc, "in_mult", 1.5, "strategy.body_scaled"),
            v_up_mult=w.number(bs_doc, "v_up_mult", 1.5, "strategy.body_scaled"),
            v_down_mult=w.number(bs_doc, "v_down_mult", 1.5, "strategy.body_scaled"),
        )
    except ValueError as exc:
        w.fail("strategy.body_scaled", str(exc))
        body_scaled = BodyScaled()
    try:
        shoulder_anchor = ShoulderAnchor(
            arm_length=w.number(sa_doc, "arm_length", 0.35, "strategy.shoulder_anchor")
        )
    except ValueError as exc:
        w.fail("strategy.shoulder_anchor", str(exc))
        shoulder_anchor = ShoulderAnchor()
    strategy = StrategyConfig(
        kind=kind,
        body_scaled=body_scaled,
        shoulder_anchor=shoulder_anchor,
        tau_ref=tau_ref,
    )

    sm_doc = w.mapping(doc.get("smoother"), "smoother")
    w.reject_unknown(sm_doc, ("tau", "c_min", "t_hold"), "smoother")
    try:
        smoother = SmootherConfig(
            tau=w.number(sm_doc, "tau", 80.0, "smoother"),
            c_min=w.number(sm_doc, "c_min", 0.3, "smoother"),
            t_hold=w.number(sm_doc, "t_hold", 300.0, "smoother"),
        )
    except ValueError as exc:
        w.fail("smoother", str(exc))
        smoother = SmootherConfig()

    cal_doc = w.mapping(doc.get("calibration"), "calibration")
    w.reject_unknown(cal_doc, ("s_max", "method", "percentile"), "calibration")
    try:
        calibration = SpeedCalibration(
            s_max=w.number(cal_doc, "s_max", 6.0, "calibration"),
            method=w.string(cal_doc, "method", "fixed", "calibration"),
            percentile=w.number(cal_doc, "percentile", 95.0, "calibration"),
        )
    except ValueError as exc:
        w.fail("calibration", str(exc))
        calibration = SpeedCalibration()

    mappings = _parse_mapping_list(doc.get("mappings", []), "mappings", w)
    if not mappings:
        w.fail("mappings", "at least one mapping is required")

    presets: dict[str, tuple[MappingSpec, ...]] = {}
    presets_doc = w.mapping(doc.get("presets"), "presets")
    for name, entry in presets_doc.items():
        preset = _parse_mapping_list(entry, f"presets.{name}", w)
        if not preset:
            w.fail(f"presets.{name}", "preset must contain at least one mapping")
        presets[name] = preset

    pairs_doc = doc.get("pairs")
    pairs: tuple[tuple[str, str], ...] = DEFAULT_PAIRS
    if pairs_doc is not None:
        if not isinstance(pairs_doc, list):
            w.fail("pairs", "expected a list of keypoint-name pairs")
        else:
            parsed: list[tuple[str, str]] = []
            for i, entry in enumerate(pairs_doc):
                if (
                    not isinstance(entry, (list, tuple))
                    or len(entry) != 2
                    or not all(isinstance(p, str) and p in KEYPOINT_ORDER for p in entry)
                ):
                    w.fail(f"pairs[{i}]", f"expected two keypoint names, got {entry!r}")
                    continue
                parsed.append((entry[0], entry[1]))
            pairs = tuple(parsed)

    telemetry_rate = w.number(doc, "telemetry_rate", 30.0, "<root>")
    if not 1.0 <= telemetry_rate <= 60.0:
        w.fail("telemetry_rate", f"must be in [1, 60], got {telemetry_rate}")
        telemetry_rate = 30.0

    ooc_doc = w.mapping(doc.get("only_on_change"), "only_on_change")
    w.reject_unknown(ooc_doc, ("enabled", "epsilon"), "only_on_change")
    only_on_change = OnlyOnChange(
        enabled=w.boolean(ooc_doc, "enabled", False, "only_on_change"),
        epsilon=w.number(ooc_doc, "epsilon", 1e-4, "only_on_change"),
    )
    if only_on_change.epsilon < 0:
        w.fail("only_on_change.epsilon", "must be >= 0")

    if w.errors:
        raise ConfigError(w.errors)
    return EngineConfig(
        listen=listen,
        osc_out=osc_out,
        strategy=strategy,
        smoother=smoother,
        calibration=calibration,
        mappings=mappings,
        presets=presets,
        pairs=pairs,
        telemetry_rate=telemetry_rate,
        only_on_change=only_on_change,
    )


def load_config(path: str | Path) -> EngineConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"parse error: {exc}"]) from exc
    return parse_config(doc)


def default_config() -> EngineConfig:
    """Playable out-of-the-box setup: right-wrist speed drives amplitude,
    right-wrist height drives pitch."""
    return parse_config(
        {
            "mappings": [
                {
                    "id": "amp",
                    "source": {"point": "right_wrist", "feature": "speed"},
                    "function": {"kind": "exp_db"},
                    "out_address": "/amp",
                    "out_range": [0.0, 1.0],
                },
                {
                    "id": "pitch",
                    "source": {"point": "right_wrist", "feature": "pos_v"},
                    "function": {"kind": "pitch_exp"},
                    "out_address": "/pitch",
                    "out_range": [220.0, 880.0],
                },
            ]
        }
    )
