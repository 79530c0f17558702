"""Live engine: WebSocket frame ingestion, telemetry, and OSC output.

One endpoint carries everything: the client streams wire records in,
control records ({"cmd": ...}) in, and receives telemetry JSON back.
Single-performer engine: one client at a time; later connections are
turned away.

Three logical contexts, frames flowing one way:
  reader  -> bounded frame queue (drop-oldest, never blocks the socket)
  worker  -> pipeline, strictly ordered by frame time
  sender  -> bounded OSC queue on its own thread

When the stream goes quiet the worker synthesizes empty tick frames from
wall time so point validity decays and outputs fall to their
send-on-invalid values instead of freezing on the last note.
"""

from __future__ import annotations

import asyncio
import json
import time
from collections import deque
from pathlib import Path
from typing import Any

from websockets.asyncio.server import ServerConnection, serve
from websockets.exceptions import ConnectionClosed

from .config import EngineConfig
from .osc import QueuedSender, UdpSender
from .pipeline import Pipeline
from .wire import PoseFrame, WireError, frame_from_doc, parse_frame, serialize_frame


class DropOldestQueue:
    """Bounded FIFO that drops the oldest entry instead of blocking."""

    def __init__(self, maxlen: int = 64):
        self._items: deque = deque()
        self._maxlen = maxlen
        self._ready = asyncio.Event()
        self.dropped = 0

    def push(self, item: Any) -> None:
        if len(self._items) >= self._maxlen:
            self._items.popleft()
            self.dropped += 1
        self._items.append(item)
        self._ready.set()

    async def pop(self) -> Any:
        while not self._items:
            self._ready.clear()
            await self._ready.wait()
        return self._items.popleft()

    def __len__(self) -> int:
        return len(self._items)


class EngineServer:
    def __init__(self, config: EngineConfig, record_path: str | Path | None = None):
        self.config = config
        self.pipeline = Pipeline(config)
        host, port = config.osc_host_port()
        self.sender = QueuedSender(UdpSender(host, port))
        self.frames = DropOldestQueue(maxlen=64)
        self.client: ServerConnection | None = None
        self.record_fp = open(record_path, "a", encoding="utf-8") if record_path else None
        self.frames_in = 0
        self.parse_errors = 0
        self.regressions = 0
        self._arrivals: deque[float] = deque(maxlen=30)
        self._last_frame_wall: float | None = None
        self._last_record_t: float | None = None
        self._started = asyncio.Event()

    # -- ingest ---------------------------------------------------------------

    async def _handle(self, ws: ServerConnection) -> None:
        if self.client is not None:
            await ws.send(json.dumps({"error": "busy", "reason": "single-performer engine"}))
            await ws.close(code=1013, reason="busy")
            return
        self.client = ws
        # New connection, new session: the stream brings its own clock.
        self.pipeline = Pipeline(self.config)
        self._last_frame_wall = None
        try:
            async for message in ws:
                if isinstance(message, bytes):
                    self.parse_errors += 1
                    continue
                try:
                    doc = json.loads(message)
                except json.JSONDecodeError:
                    self.parse_errors += 1
                    continue
                if isinstance(doc, dict) and "cmd" in doc:
                    await self._handle_control(ws, doc)
                    continue
                try:
                    frame = frame_from_doc(doc)
                except WireError:
                    self.parse_errors += 1
                    continue
                self.frames.push(frame)
        except ConnectionClosed:
            pass
        finally:
            if self.client is ws:
                self.client = None

    async def _handle_control(self, ws: ServerConnection, doc: dict) -> None:
        cmd = doc.get("cmd")
        reply: dict[str, Any] = {"ack": cmd, "ok": True}
        try:
            if cmd == "set_strategy":
                self.pipeline.set_strategy(str(doc.get("kind")))
            elif cmd == "set_threshold":
                self.pipeline.set_threshold(float(doc.get("value")))
            elif cmd == "set_preset":
                self.pipeline.set_preset(str(doc.get("name")))
            elif cmd == "calibrate":
                self.pipeline.start_calibration(float(doc.get("duration_ms", 10_000.0)))
            else:
                reply = {"ack": cmd, "ok": False, "error": f"unknown command {cmd!r}"}
        except (TypeError, ValueError) as exc:
            reply = {"ack": cmd, "ok": False, "error": str(exc)}
        reply["state"] = self.pipeline.snapshot()["state"]
        try:
            await ws.send(json.dumps(reply))
        except ConnectionClosed:
            pass

    # -- processing -------------------------------------------------------------

    def _process(self, frame: PoseFrame) -> None:
        updates = self.pipeline.process(frame)
        for update in updates:
            self.sender.enqueue(update)

    async def _worker(self) -> None:
        while True:
            frame = await self.frames.pop()
            self.frames_in += 1
            now = time.monotonic()
            self._arrivals.append(now)
            self._last_frame_wall = now
            before = self.pipeline.stale_drops
            self._process(frame)
            if self.pipeline.stale_drops > before:
                self.regressions += 1
            elif self.record_fp is not None:
                if self._last_record_t is None or frame.t >= self._last_record_t:
                    self.record_fp.write(serialize_frame(frame) + "\n")
                    self._last_record_t = frame.t

    async def _telemetry_loop(self) -> None:
        interval = 1.0 / self.config.telemetry_rate
        while True:
            await asyncio.sleep(interval)
            self._tick_if_idle()
            done = self.pipeline.poll_calibration()
            client = self.client
            if client is None:
                continue
            if done is not None:
                event = {"event": "calibration_done", "ok": done.ok, "s_max": done.s_max,
                         "samples": done.samples, "error": done.error}
                try:
                    await client.send(json.dumps(event))
                except ConnectionClosed:
                    continue
            try:
                await client.send(json.dumps(self.telemetry()))
            except ConnectionClosed:
                pass

    def _tick_if_idle(self) -> None:
        # No frames lately: advance the pipeline clock from wall time so
        # validity decays and mapped outputs fail to silence.
        if self._last_frame_wall is None or len(self.frames) > 0:
            return
        now = time.monotonic()
        idle_s = now - self._last_frame_wall
        if idle_s < 2.0 / self.config.telemetry_rate:
            return
        last_t = self.pipeline.snapshot()["t"]
        if last_t is None:
            return
        self._process(PoseFrame(last_t + idle_s * 1000.0, {}))

    def ingest_fps(self) -> float:
        if len(self._arrivals) < 2:
            return 0.0
        span = self._arrivals[-1] - self._arrivals[0]
        if span <= 0:
            return 0.0
        return (len(self._arrivals) - 1) / span

    def telemetry(self) -> dict[str, Any]:
        snap = self.pipeline.snapshot()
        snap["fps"] = round(self.ingest_fps(), 2)
        snap["counters"] = {
            "frames": self.frames_in,
            "queue_drops": self.frames.dropped,
            "stale_drops": self.pipeline.stale_drops,
            "parse_errors": self.parse_errors,
            "send_errors": self.sender.errors,
            "osc_sent": self.sender.sent,
            "osc_queue_drops": self.sender.dropped,
        }
        return snap

    # -- lifecycle ---------------------------------------------------------------

    async def serve_forever(self) -> None:
        host, port = self.config.listen_host_port()
        worker = asyncio.create_task(self._worker())
        telemetry = asyncio.create_task(self._telemetry_loop())
        try:
            async with serve(self._handle, host, port):
                self._started.set()
                await asyncio.Future()
        finally:
            worker.cancel()
            telemetry.cancel()
            self.sender.close()
            if self.record_fp is not None:
                self.record_fp.close()

    async def wait_started(self) -> None:
        await self._started.wait()


async def record_server(listen: str, output_path: str | Path) -> None:
    """Minimal capture endpoint: appends canonical records, rejects
    timestamp regressions, prints the count on shutdown."""
    host, _, port = listen.removeprefix("ws://").rpartition(":")
    written = 0
    regressions = 0
    last_t: float | None = None
    lock = asyncio.Lock()

    with open(output_path, "a", encoding="utf-8") as fp:

        async def handle(ws: ServerConnection) -> None:
            nonlocal written, regressions, last_t
            async for message in ws:
                if isinstance(message, bytes):
                    continue
                try:
                    frame = parse_frame(message)
                except WireError:
                    continue
                async with lock:
                    if last_t is not None and frame.t < last_t:
                        regressions += 1
                        continue
                    fp.write(serialize_frame(frame) + "\n")
                    last_t = frame.t
                    written += 1

        try:
            async with serve(handle, host or "127.0.0.1", int(port)):
                await asyncio.Future()
        finally:
            print(f"recorded {written} frames ({regressions} regressions rejected)")
