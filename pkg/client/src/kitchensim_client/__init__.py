"""Thin scripting client for the kitchensim wire protocol.

Speaks length-prefixed JSON frames over TCP and exposes the usual
reset/step/observe environment idiom. Blocking I/O, one request in flight
at a time (the protocol alternates strictly), no retries: environments
are local and failures should surface immediately.

The server address comes from the constructor or the KITCHENSIM_ADDR
environment variable ("host:port").
"""

from __future__ import annotations

import json
import os
import socket
import struct
import uuid

PROTO_VERSION = 1
_HEADER = struct.Struct(">I")

__all__ = ["EnvHandle", "ServerError", "ClientError", "connect"]


class ClientError(Exception):
    """Local misuse: stepping a finished episode, bad address, lost peer."""


class ServerError(Exception):
    """The server answered with an error frame."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


def _parse_addr(addr: str) -> tuple[str, int]:
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise ClientError(f"bad address {addr!r}; expected host:port")
    return host, int(port)


def encode_frame(obj: dict) -> bytes:
    body = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return _HEADER.pack(len(body)) + body


def decode_frame(body: bytes) -> dict:
    return json.loads(body.decode("utf-8"))


class EnvHandle:
    """One session against a kitchensim server.

    Use one handle per thread; open several handles for several sessions.
    """

    def __init__(self, address: str | None = None, session: str | None = None,
                 timeout: float = 30.0):
        addr = address or os.environ.get("KITCHENSIM_ADDR", "127.0.0.1:7788")
        host, port = _parse_addr(addr)
        try:
            self._sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise ClientError(f"cannot connect to {addr}: {exc}") from exc
        self._sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self.session = session or uuid.uuid4().hex[:12]
        self.seq = 0
        self.task: str | None = None
        self.scene: str | None = None
        self.seed: int | None = None
        self.mode: str | None = None
        self.obs_mode: str | None = None
        self.done = False

    # -- framing -----------------------------------------------------------

    def _read_exact(self, n: int) -> bytes:
        chunks = []
        got = 0
        while got < n:
            chunk = self._sock.recv(n - got)
            if not chunk:
                raise ClientError("server closed the connection")
            chunks.append(chunk)
            got += len(chunk)
        return b"".join(chunks)

    def request(self, cmd: str, **fields) -> dict:
        """One raw command round trip; returns the payload or raises."""
        self.seq += 1
        frame = {"proto_version": PROTO_VERSION, "session": self.session,
                 "seq": self.seq, "cmd": cmd, **fields}
        self._sock.sendall(encode_frame(frame))
        header = self._read_exact(_HEADER.size)
        (length,) = _HEADER.unpack(header)
        reply = decode_frame(self._read_exact(length))
        if not reply.get("ok"):
            err = reply.get("error", {})
            raise ServerError(err.get("code", "unknown"), err.get("message", ""))
        return reply["payload"]

    # -- environment idiom ---------------------------------------------------

    def reset(self, task: str, scene: str | None = None, seed: int = 0,
              obs: str | None = None) -> dict:
        """Start a fresh episode; returns the first observation payload."""
        fields: dict = {"task": task, "seed": seed}
        if scene is not None:
            fields["scene"] = scene
        if obs is not None:
            fields["obs"] = obs
        payload = self.request("reset", **fields)
        self.task = payload["task"]
        self.scene = payload["scene"]
        self.seed = payload["seed"]
        self.mode = payload["mode"]
        self.obs_mode = obs
        self.done = bool(payload["done"])
        return payload

    def step(self, action: dict) -> tuple[dict, float, bool, dict]:
        """Gym-style step: (observation, reward, done, info)."""
        if self.mode is None:
            raise ClientError("no episode; call reset first")
        if self.done:
            raise ClientError("episode is done; call reset")
        cmd = "step_discrete" if self.mode == "discrete" else "step_continuous"
        fields: dict = {"action": action}
        if self.obs_mode is not None:
            fields["obs"] = self.obs_mode
        payload = self.request(cmd, **fields)
        self.done = bool(payload["done"])
        info = {"done_reason": payload.get("done_reason"),
                "failed": payload.get("failed"),
                "failure_reason": payload.get("failure_reason"),
                "events": payload.get("events")}
        return payload, float(payload["reward"]), self.done, info

    def observe(self, obs: str | None = None) -> dict:
        return self.request("observe", **({"obs": obs} if obs else {}))

    def legal_actions(self) -> list[dict]:
        return self.request("legal_actions")["actions"]

    def start_recording(self, path: str) -> str:
        return self.request("start_recording", path=path)["recording"]

    def stop_recording(self) -> str:
        return self.request("stop_recording")["path"]

    def shutdown_server(self) -> None:
        self.request("shutdown")

    def close(self) -> None:
        self._sock.close()

    def __enter__(self) -> "EnvHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def connect(address: str | None = None, **kw) -> EnvHandle:
    return EnvHandle(address, **kw)
