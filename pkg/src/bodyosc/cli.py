"""Command-line interface.

Subcommands:
  run        host the live engine (frame ingest + telemetry + OSC out)
  replay     feed a recorded session through the pipeline into a sink
  record     capture incoming frames to a session file
  analyze    print mapping curves or JND reports as CSV
  calibrate  fit the full-scale speed from a recorded session
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from contextlib import ExitStack

from .config import ConfigError, EngineConfig, default_config, load_config
from .mapping import (
    ExpDb,
    ExpNorm,
    Linear,
    MappingFn,
    PitchExp,
    amplitude_curve,
    calibrate,
    jnd_analyze,
)
from .replay import collect_speed_samples, open_sink, replay_file
from .wire import WireError, replay_session


def _load(path: str | None) -> EngineConfig:
    return load_config(path) if path else default_config()


def _build_function(name: str, params: dict[str, float]) -> MappingFn:
    if name == "linear":
        return Linear()
    if name == "exp_db":
        return ExpDb(**params)
    if name == "exp_norm":
        return ExpNorm(**params)
    if name == "pitch_exp":
        return PitchExp(**params)
    raise ValueError(f"unknown mapping function {name!r}")


def _parse_params(items: list[str]) -> dict[str, float]:
    params: dict[str, float] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {item!r}")
        params[key] = float(value)
    return params


def cmd_run(args: argparse.Namespace) -> int:
    from .server import EngineServer

    config = _load(args.config)
    server = EngineServer(config, record_path=args.record)
    host, port = config.listen_host_port()
    print(f"listening on ws://{host}:{port}, OSC to {config.osc_out}", file=sys.stderr)
    try:
        asyncio.run(server.serve_forever())
    except KeyboardInterrupt:
        pass
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    config = _load(args.config)
    with ExitStack() as stack:
        sink = open_sink(args.sink, stack)
        stats = replay_file(config, args.input, sink, fast=args.fast)
    print(stats.summary(), file=sys.stderr)
    return 0


def cmd_record(args: argparse.Namespace) -> int:
    from .server import record_server

    print(f"recording from {args.listen} to {args.output} (Ctrl-C to stop)", file=sys.stderr)
    try:
        asyncio.run(record_server(args.listen, args.output))
    except KeyboardInterrupt:
        pass
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    fn = _build_function(args.function, _parse_params(args.params))
    if args.kind == "curve":
        sys.stdout.write("s,m\n")
        for s, m in amplitude_curve(fn):
            sys.stdout.write(f"{s!r},{m!r}\n")
        return 0
    report = jnd_analyze(fn, w_in=args.w_in, l_jnd=args.l_jnd)
    sys.stdout.write(report.to_csv())
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    config = _load(args.config)
    with open(args.input, "r", encoding="utf-8") as fp:
        samples = collect_speed_samples(config, replay_session(fp, mode="fast"))
    cal = calibrate(samples, percentile=args.percentile)
    print(f"s_max: {cal.s_max!r}")
    print(f"samples: {len(samples)}, percentile: {args.percentile}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bodyosc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="host the live engine")
    p_run.add_argument("--config", help="engine configuration file (YAML)")
    p_run.add_argument("--record", help="append accepted frames to this session file")
    p_run.set_defaults(func=cmd_run)

    p_replay = sub.add_parser("replay", help="replay a session file")
    p_replay.add_argument("--config", help="engine configuration file (YAML)")
    p_replay.add_argument("--input", required=True, help="session file (.jsonl)")
    p_replay.add_argument(
        "--sink", default="udp", help="udp[:host:port] | capture:<file> | csv:<file>"
    )
    p_replay.add_argument("--fast", action="store_true", help="do not pace to frame timestamps")
    p_replay.set_defaults(func=cmd_replay)

    p_record = sub.add_parser("record", help="capture frames to a session file")
    p_record.add_argument("--listen", default="ws://127.0.0.1:9000")
    p_record.add_argument("--output", required=True)
    p_record.set_defaults(func=cmd_record)

    p_analyze = sub.add_parser("analyze", help="mapping curve / JND report CSV")
    p_analyze.add_argument("kind", choices=("jnd", "curve"))
    p_analyze.add_argument("--function", default="exp_db",
                           help="linear | exp_db | exp_norm | pitch_exp")
    p_analyze.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE")
    p_analyze.add_argument("--w-in", type=float, default=0.1, dest="w_in",
                           help="input JND as a Weber fraction")
    p_analyze.add_argument("--l-jnd", type=float, default=1.0, dest="l_jnd",
                           help="output JND in dB")
    p_analyze.set_defaults(func=cmd_analyze)

    p_cal = sub.add_parser("calibrate", help="fit s_max from a session file")
    p_cal.add_argument("--input", required=True)
    p_cal.add_argument("--percentile", type=float, default=95.0)
    p_cal.add_argument("--config", help="engine configuration file (YAML)")
    p_cal.set_defaults(func=cmd_calibrate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, WireError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
