"""Wire protocol: length-prefixed UTF-8 JSON frames over TCP.

Every frame is a 4-byte big-endian length followed by that many bytes of
JSON (one object). Requests carry ``proto_version``, a client-chosen
``session`` string, a strictly increasing integer ``seq``, and a ``cmd``;
responses echo session and seq and carry either ``payload`` (ok) or
``error`` with a stable code. Request/response strictly alternate per
connection.

Commands: reset, step_discrete, step_continuous, observe, legal_actions,
start_recording, stop_recording, shutdown.
"""

from __future__ import annotations

import json
import socket
import struct

from .errors import ProtocolError

PROTO_VERSION = 1
MAX_FRAME = 8 * 1024 * 1024
_HEADER = struct.Struct(">I")

COMMANDS = ("reset", "step_discrete", "step_continuous", "observe",
            "legal_actions", "start_recording", "stop_recording", "shutdown")

ERROR_CODES = ("bad_frame", "bad_version", "bad_session", "bad_sequence",
               "unknown_command", "no_episode", "episode_done", "mode_mismatch",
               "bad_action", "unknown_task", "unknown_scene", "recording_error",
               "busy", "internal")


def encode_frame(obj: dict) -> bytes:
    body = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")
    if len(body) > MAX_FRAME:
        raise ProtocolError("bad_frame", f"frame of {len(body)} bytes exceeds limit")
    return _HEADER.pack(len(body)) + body


def decode_frame(body: bytes) -> dict:
    try:
        obj = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError("bad_frame", f"frame is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("bad_frame", "frame must be a JSON object")
    return obj


def read_exact(sock: socket.socket, n: int) -> bytes | None:
    """Read exactly n bytes; None on clean EOF at a frame boundary."""
    chunks: list[bytes] = []
    got = 0
    while got < n:
        chunk = sock.recv(n - got)
        if not chunk:
            if got == 0:
                return None
            raise ProtocolError("bad_frame", "connection closed mid-frame")
        chunks.append(chunk)
        got += len(chunk)
    return b"".join(chunks)


def read_frame_raw(sock: socket.socket) -> bytes | None:
    """Read one frame body; None on clean EOF.

    Raises only for transport-level damage (oversized declared length,
    mid-frame EOF) after which the byte stream cannot be resynchronised.
    A body that is not valid JSON is recoverable: framing stays intact.
    """
    header = read_exact(sock, _HEADER.size)
    if header is None:
        return None
    (length,) = _HEADER.unpack(header)
    if length > MAX_FRAME:
        raise ProtocolError("bad_frame", f"declared frame length {length} exceeds limit")
    body = read_exact(sock, length)
    if body is None:
        raise ProtocolError("bad_frame", "connection closed mid-frame")
    return body


def read_frame(sock: socket.socket) -> dict | None:
    """Read one frame; None on clean EOF."""
    body = read_frame_raw(sock)
    if body is None:
        return None
    return decode_frame(body)


def write_frame(sock: socket.socket, obj: dict) -> None:
    sock.sendall(encode_frame(obj))


def ok_response(session: str, seq, payload: dict) -> dict:
    return {"proto_version": PROTO_VERSION, "session": session, "seq": seq,
            "ok": True, "payload": payload}


def error_response(session, seq, code: str, message: str) -> dict:
    return {"proto_version": PROTO_VERSION, "session": session, "seq": seq,
            "ok": False, "error": {"code": code, "message": message}}


def validate_request(frame: dict) -> tuple[str, str, int]:
    """Check the envelope; returns (session, cmd, seq)."""
    version = frame.get("proto_version")
    if version != PROTO_VERSION:
        raise ProtocolError("bad_version", f"unsupported proto_version {version!r}")
    session = frame.get("session")
    if not isinstance(session, str) or not session:
        raise ProtocolError("bad_session", "frame needs a non-empty 'session' string")
    seq = frame.get("seq")
    if not isinstance(seq, int) or isinstance(seq, bool):
        raise ProtocolError("bad_sequence", "frame needs an integer 'seq'")
    cmd = frame.get("cmd")
    if cmd not in COMMANDS:
        raise ProtocolError("unknown_command",
                            f"unknown cmd {cmd!r}; known: {', '.join(COMMANDS)}")
    return session, cmd, seq
