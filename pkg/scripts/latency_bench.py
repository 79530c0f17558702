#!/usr/bin/env python3
"""Measure per-frame pipeline latency (parse through encode) over a session.

Usage: python scripts/latency_bench.py [--config configs/default.yaml]
       [--input data/sessions/synthetic_10s_30fps.jsonl] [--repeats 5]
"""

from __future__ import annotations

import argparse
import statistics
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from bodyosc.config import load_config  # noqa: E402
from bodyosc.replay import replay_file  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(ROOT / "configs" / "default.yaml"))
    parser.add_argument("--input", default=str(ROOT / "data" / "sessions" / "synthetic_10s_30fps.jsonl"))
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    config = load_config(args.config)
    all_times: list[float] = []
    for i in range(args.repeats):
        stats = replay_file(config, args.input, lambda updates: None, fast=True)
        all_times.extend(stats.frame_times_ms)
        print(f"run {i + 1}: {stats.summary()}")

    ordered = sorted(all_times)
    print(
        f"overall: n={len(ordered)} median={statistics.median(ordered):.3f} ms "
        f"p95={ordered[int(0.95 * len(ordered))]:.3f} ms "
        f"p99={ordered[int(0.99 * len(ordered))]:.3f} ms max={ordered[-1]:.3f} ms"
    )
    budget = statistics.median(ordered) < 1.0
    print(f"median under the 1 ms desktop budget: {'yes' if budget else 'NO'}")
    return 0 if budget else 1


if __name__ == "__main__":
    sys.exit(main())
