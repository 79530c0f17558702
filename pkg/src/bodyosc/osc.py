"""OSC 1.0 message encoding, UDP sending, and capture sinks.

Messages carry a single float argument: null-padded address, type tag ",f",
then the value as a 32-bit big-endian IEEE-754 float. No bundles, no
timetags. The capture sink stores raw datagrams with 4-byte big-endian
length prefixes so replay tests can compare byte-for-byte; the CSV sink
stores (t_ms, address, value) rows.
"""

from __future__ import annotations

import math
import socket
import struct
import threading
from collections import deque
from typing import IO, Iterable, Sequence

from .routing import ParamUpdate


class OscAddressError(ValueError):
    """Address violates the OSC address grammar."""


def validate_address(address: str) -> None:
    if not address.startswith("/") or len(address) < 2:
        raise OscAddressError(f"OSC address must start with '/': {address!r}")
    for ch in address:
        code = ord(ch)
        if code < 0x21 or code > 0x7E:
            raise OscAddressError(f"illegal character {ch!r} in OSC address {address!r}")


_TYPE_TAG_F = b",f\x00\x00"


def encode_message(address: str, value: float) -> bytes:
    """Encode one OSC message; the result length is always a multiple of 4."""
    validate_address(address)
    addr = address.encode("ascii") + b"\x00"
    addr += b"\x00" * (-len(addr) % 4)
    return addr + _TYPE_TAG_F + struct.pack(">f", value)


def encode_update(update: ParamUpdate) -> bytes:
    return encode_message(update.address, update.value)


class UdpSender:
    """Fire-and-forget OSC over UDP. Socket errors are counted, never raised,
    so a dead synth cannot stall the frame pipeline."""

    def __init__(self, host: str, port: int):
        self.destination = (host, port)
        self.sent = 0
        self.errors = 0
        # getaddrinfo up front: an unresolvable destination is a config
        # error, not a runtime condition.
        socket.getaddrinfo(host, port, socket.AF_INET, socket.SOCK_DGRAM)
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)

    def send(self, updates: Iterable[ParamUpdate]) -> int:
        count = 0
        for update in updates:
            if self.send_one(update):
                count += 1
        return count

    def send_one(self, update: ParamUpdate) -> bool:
        try:
            self._sock.sendto(encode_update(update), self.destination)
        except OSError:
            self.errors += 1
            return False
        self.sent += 1
        return True

    def close(self) -> None:
        self._sock.close()


class QueuedSender:
    """Bounded send queue on its own thread, between pipeline and socket.

    When the queue is full the oldest queued update for the incoming
    update's address is replaced first; only if the address has nothing
    queued does the globally oldest entry go. Freshness over completeness:
    a live instrument wants the newest value, not the full history.
    """

    def __init__(self, sender: UdpSender, maxlen: int = 256, start: bool = True):
        self._sender = sender
        self._maxlen = maxlen
        self._queue: deque[ParamUpdate] = deque()
        self._lock = threading.Lock()
        self._ready = threading.Event()
        self._closing = False
        self.dropped = 0
        self._thread: threading.Thread | None = None
        if start:
            self._thread = threading.Thread(target=self._run, name="osc-sender", daemon=True)
            self._thread.start()

    @property
    def sent(self) -> int:
        return self._sender.sent

    @property
    def errors(self) -> int:
        return self._sender.errors

    def enqueue(self, update: ParamUpdate) -> None:
        with self._lock:
            if len(self._queue) >= self._maxlen:
                stale = None
                for i, queued in enumerate(self._queue):
                    if queued.address == update.address:
                        stale = i
                        break
                if stale is not None:
                    del self._queue[stale]
                else:
                    self._queue.popleft()
                self.dropped += 1
            self._queue.append(update)
        self._ready.set()

    def _run(self) -> None:
        while True:
            self._ready.wait(timeout=0.1)
            while True:
                with self._lock:
                    if not self._queue:
                        self._ready.clear()
                        break
                    update = self._queue.popleft()
                self._sender.send_one(update)
            if self._closing and not self._queue:
                return

    def close(self) -> None:
        self._closing = True
        self._ready.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)
        self._sender.close()


def _csv_number(x: float) -> str:
    if math.isfinite(x) and abs(x) < 2**53 and x == int(x):
        return str(int(x))
    return repr(x)


class CaptureWriter:
    """Byte-exact datagram capture: repeated [u32 BE length][datagram]."""

    def __init__(self, fp: IO[bytes]):
        self._fp = fp

    def write(self, updates: Sequence[ParamUpdate]) -> int:
        for update in updates:
            datagram = encode_update(update)
            self._fp.write(struct.pack(">I", len(datagram)))
            self._fp.write(datagram)
        return len(updates)


class CsvWriter:
    """Text capture: t_ms,address,value with shortest round-trip numbers."""

    def __init__(self, fp: IO[str]):
        self._fp = fp
        self._fp.write("t_ms,address,value\n")

    def write(self, updates: Sequence[ParamUpdate]) -> int:
        for update in updates:
            self._fp.write(f"{_csv_number(update.t)},{update.address},{_csv_number(update.value)}\n")
        return len(updates)
