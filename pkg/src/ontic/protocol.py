"""Length-prefixed frame format and byte transports.

Frame layout: ``u32 payload length (big-endian) | u8 type | payload``.

=========  ====  ==========================================================
type       tag   payload
=========  ====  ==========================================================
HELLO      0x01  version (0x01) | r | name length | name (UTF-8)
STATE      0x02  u64 index n (big-endian) | label, minimal big-endian bytes
END        0x03  empty
ERROR      0x04  UTF-8 message
=========  ====  ==========================================================
"""

from __future__ import annotations

import enum
import socket
import struct
import threading
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, Optional

VERSION = 1
HEADER = struct.Struct(">IB")
MAX_PAYLOAD = 1 << 20


class FrameType(enum.IntEnum):
    HELLO = 0x01
    STATE = 0x02
    END = 0x03
    ERROR = 0x04


class ProtocolError(Exception):
    def __init__(self, message: str, ordinal: Optional[int] = None):
        where = f"frame {ordinal}: " if ordinal is not None else ""
        super().__init__(where + message)
        self.ordinal = ordinal


@dataclass(frozen=True)
class Frame:
    type: int
    payload: bytes = b""

    def encode(self) -> bytes:
        return HEADER.pack(len(self.payload), self.type) + self.payload


def hello(r: int, name: str) -> Frame:
    raw = name.encode("utf-8")
    if len(raw) > 255:
        raise ValueError("rule name longer than 255 bytes")
    return Frame(FrameType.HELLO, bytes([VERSION, r, len(raw)]) + raw)


def state(n: int, label: int) -> Frame:
    return Frame(FrameType.STATE, struct.pack(">Q", n) + label_bytes(label))


def end() -> Frame:
    return Frame(FrameType.END)


def error(message: str) -> Frame:
    return Frame(FrameType.ERROR, message.encode("utf-8"))


def label_bytes(label: int) -> bytes:
    return label.to_bytes((label.bit_length() + 7) // 8, "big")


def parse_hello(frame: Frame, ordinal: int) -> tuple[int, int, str]:
    p = frame.payload
    if len(p) < 3 or len(p) != 3 + p[2]:
        raise ProtocolError("HELLO payload length does not match its name length", ordinal)
    try:
        name = p[3:].decode("utf-8")
    except UnicodeDecodeError:
        raise ProtocolError("HELLO rule name is not UTF-8", ordinal) from None
    return p[0], p[1], name


def parse_state(frame: Frame, ordinal: int) -> tuple[int, int]:
    p = frame.payload
    if len(p) < 8:
        raise ProtocolError(f"STATE payload has {len(p)} bytes, need at least 8", ordinal)
    return struct.unpack(">Q", p[:8])[0], int.from_bytes(p[8:], "big")


def _read_exact(source: BinaryIO, size: int) -> bytes:
    buf = bytearray()
    while len(buf) < size:
        chunk = source.read(size - len(buf))
        if not chunk:
            break
        buf += chunk
    return bytes(buf)


def read_frames(source: BinaryIO) -> Iterator[Frame]:
    """Decode frames until end of stream.

    A stream that ends, even mid-frame, simply stops the iteration; callers
    detect truncation by the missing END frame.
    """
    ordinal = 0
    while True:
        head = _read_exact(source, HEADER.size)
        if len(head) < HEADER.size:
            return
        ordinal += 1
        size, ftype = HEADER.unpack(head)
        if ftype not in FrameType._value2member_map_:
            raise ProtocolError(f"unknown frame type 0x{ftype:02x}", ordinal)
        if size > MAX_PAYLOAD:
            raise ProtocolError(f"payload length {size} exceeds {MAX_PAYLOAD}", ordinal)
        payload = _read_exact(source, size)
        if len(payload) < size:
            return
        yield Frame(ftype, payload)


def write_frames(frames: Iterable[Frame], sink: BinaryIO) -> int:
    """Write ``frames`` to ``sink``; on a write failure try to send ERROR, then close."""
    written = 0
    try:
        for f in frames:
            sink.write(f.encode())
            written += 1
        sink.flush()
    except OSError as exc:
        try:
            sink.write(error(str(exc)).encode())
            sink.flush()
        except OSError:
            pass
        try:
            sink.close()
        except OSError:
            pass
        raise
    return written


class MemoryPipe:
    """Blocking in-memory byte pipe for a writer thread and a reader thread."""

    def __init__(self):
        self._buf = bytearray()
        self._closed = False
        self._cond = threading.Condition()

    def write(self, data: bytes) -> int:
        with self._cond:
            if self._closed:
                raise BrokenPipeError("write to closed pipe")
            self._buf += data
            self._cond.notify_all()
        return len(data)

    def read(self, size: int = -1) -> bytes:
        with self._cond:
            while not self._buf and not self._closed:
                self._cond.wait()
            if size < 0 or size >= len(self._buf):
                out = bytes(self._buf)
                self._buf.clear()
            else:
                out = bytes(self._buf[:size])
                del self._buf[:size]
            return out

    def flush(self) -> None:
        pass

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()


class TCPServer:
    """Serve one connection: accept, stream frames, close."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self.sock = socket.create_server((host, port))

    @property
    def address(self) -> tuple[str, int]:
        return self.sock.getsockname()[:2]

    def serve_once(self, frames: Iterable[Frame]) -> int:
        try:
            conn, _ = self.sock.accept()
            with conn, conn.makefile("wb") as sink:
                return write_frames(frames, sink)
        finally:
            self.sock.close()


def tcp_frames(host: str, port: int, timeout: Optional[float] = 30.0) -> Iterator[Frame]:
    with socket.create_connection((host, port), timeout=timeout) as conn:
        with conn.makefile("rb") as source:
            yield from read_frames(source)
