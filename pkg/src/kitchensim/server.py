"""TCP environment server: one session per connection, blocking dispatch.

Each connection binds to the session id in its first frame and owns an
isolated episode. The scene library is loaded once and shared read-only;
there is no cross-session mutable state. A malformed frame produces an
error response and the session lives on; only transport-level damage
(oversized or truncated frames) closes the connection, since the stream
can no longer be trusted.
"""

from __future__ import annotations

import logging
import os
import socket
import threading
from pathlib import Path

from . import protocol
from .actions import decode_action
from .demos import TrajectoryRecorder
from .envs import make_episode
from .errors import ConfigError, EpisodeOver, KitchenSimError, ProtocolError
from .sceneconf import SceneLibrary
from .tooluse import decode_hand_action

log = logging.getLogger("kitchensim.server")


def _setup_logging() -> None:
    level = os.environ.get("KITCHENSIM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")


class _Session:
    def __init__(self, session_id: str):
        self.id = session_id
        self.last_seq: int | None = None
        self.episode = None
        self.recorder: TrajectoryRecorder | None = None

    def close(self) -> None:
        if self.recorder is not None:
            self.recorder.close()
            self.recorder = None


class KitchenServer:
    def __init__(self, host: str = "127.0.0.1", port: int = 0,
                 scene_dir: str | None = None, max_sessions: int = 32,
                 record_dir: str | None = None):
        self.library = SceneLibrary(scene_dir)
        self.max_sessions = max_sessions
        self.record_dir = Path(record_dir) if record_dir else None
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen(64)
        self._sock.settimeout(0.2)
        self.address = self._sock.getsockname()
        self._shutdown = threading.Event()
        self._active = 0
        self._lock = threading.Lock()
        self._threads: list[threading.Thread] = []

    # -- lifecycle ---------------------------------------------------------

    def serve_forever(self) -> None:
        log.info("serving on %s:%d", *self.address)
        try:
            while not self._shutdown.is_set():
                try:
                    conn, addr = self._sock.accept()
                except socket.timeout:
                    continue
                except OSError:
                    break
                with self._lock:
                    if self._active >= self.max_sessions:
                        try:
                            protocol.write_frame(conn, protocol.error_response(
                                None, None, "busy", "session limit reached"))
                        except OSError:
                            pass
                        conn.close()
                        continue
                    self._active += 1
                thread = threading.Thread(target=self._serve_client,
                                          args=(conn, addr), daemon=True)
                thread.start()
                self._threads.append(thread)
        finally:
            self._sock.close()

    def start(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread

    def shutdown(self) -> None:
        self._shutdown.set()

    # -- per-connection loop -------------------------------------------------

    def _serve_client(self, conn: socket.socket, addr) -> None:
        log.info("client connected: %s", addr)
        session: _Session | None = None
        try:
            conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            while not self._shutdown.is_set():
                try:
                    body = protocol.read_frame_raw(conn)
                except ProtocolError as exc:
                    # Framing is gone; answer once and drop the transport.
                    try:
                        protocol.write_frame(conn, protocol.error_response(
                            session.id if session else None, None,
                            exc.code, str(exc)))
                    except OSError:
                        pass
                    break
                if body is None:
                    break
                try:
                    frame = protocol.decode_frame(body)
                except ProtocolError as exc:
                    # Bad JSON inside an intact frame: the session survives.
                    try:
                        protocol.write_frame(conn, protocol.error_response(
                            session.id if session else None, None,
                            exc.code, str(exc)))
                    except OSError:
                        break
                    continue
                response = self._handle_frame(frame, session)
                if isinstance(response, tuple):
                    session, reply = response
                else:
                    reply = response
                try:
                    protocol.write_frame(conn, reply)
                except OSError:
                    break
                if reply.get("payload", {}) and reply["payload"].get("shutdown"):
                    self.shutdown()
                    break
        finally:
            if session is not None:
                session.close()
            conn.close()
            with self._lock:
                self._active -= 1
            log.info("client gone: %s", addr)

    def _handle_frame(self, frame: dict, session: _Session | None):
        try:
            sid, cmd, seq = protocol.validate_request(frame)
        except ProtocolError as exc:
            return protocol.error_response(frame.get("session"), frame.get("seq"),
                                           exc.code, str(exc))
        if session is None:
            session = _Session(sid)
        elif sid != session.id:
            return session, protocol.error_response(
                session.id, seq, "bad_session",
                f"connection is bound to session {session.id!r}")
        if session.last_seq is not None and seq <= session.last_seq:
            return session, protocol.error_response(
                session.id, seq, "bad_sequence",
                f"seq {seq} is not greater than {session.last_seq}")
        session.last_seq = seq

        try:
            payload = self._dispatch(cmd, frame, session)
            return session, protocol.ok_response(session.id, seq, payload)
        except ProtocolError as exc:
            return session, protocol.error_response(session.id, seq, exc.code, str(exc))
        except EpisodeOver as exc:
            return session, protocol.error_response(session.id, seq,
                                                    "episode_done", str(exc))
        except ConfigError as exc:
            code = "unknown_scene" if "scene" in str(exc) else "unknown_task"
            return session, protocol.error_response(session.id, seq, code, str(exc))
        except (ValueError, KeyError) as exc:
            return session, protocol.error_response(session.id, seq,
                                                    "bad_action", str(exc))
        except KitchenSimError as exc:
            return session, protocol.error_response(session.id, seq,
                                                    "internal", str(exc))
        except Exception as exc:  # never let a session kill the server
            log.exception("internal error in cmd %s", cmd)
            return session, protocol.error_response(session.id, seq,
                                                    "internal", repr(exc))

    # -- command dispatch ------------------------------------------------------

    def _dispatch(self, cmd: str, frame: dict, session: _Session) -> dict:
        if cmd == "shutdown":
            session.close()
            return {"shutdown": True}

        if cmd == "reset":
            task = frame.get("task")
            if not isinstance(task, str):
                raise ProtocolError("unknown_task", "reset needs a 'task' string")
            scene = frame.get("scene")
            if scene is not None and not isinstance(scene, str):
                raise ProtocolError("unknown_scene", "'scene' must be a string")
            seed = frame.get("seed", 0)
            if not isinstance(seed, int) or isinstance(seed, bool):
                raise ProtocolError("bad_action", "'seed' must be an integer")
            if session.recorder is not None:
                session.recorder.close()
                session.recorder = None
            session.episode = make_episode(self.library, task, scene, seed)
            return session.episode.payload(with_raster=frame.get("obs") == "raster")

        episode = session.episode
        if episode is None:
            raise ProtocolError("no_episode", "no active episode; send reset first")

        if cmd == "observe":
            return episode.payload(with_raster=frame.get("obs") == "raster")

        if cmd == "legal_actions":
            if episode.mode != "discrete":
                raise ProtocolError("mode_mismatch",
                                    "legal_actions applies to discrete episodes")
            return {"actions": [a.encode() for a in episode.legal_actions()]}

        if cmd == "step_discrete":
            if episode.mode != "discrete":
                raise ProtocolError("mode_mismatch", "episode is continuous")
            action = decode_action(frame.get("action"))
            result = episode.step(action)
            payload = episode.payload(with_raster=frame.get("obs") == "raster")
            payload["failed"] = result.failed
            payload["failure_reason"] = result.failure_reason
            payload["events"] = list(result.events)
            if session.recorder is not None:
                session.recorder.append(episode.digest(), action.encode(),
                                        result.reward, episode.done)
            return payload

        if cmd == "step_continuous":
            if episode.mode != "continuous":
                raise ProtocolError("mode_mismatch", "episode is discrete")
            action = decode_hand_action(frame.get("action"))
            reward, done = episode.step(action)
            payload = episode.payload()
            if session.recorder is not None:
                session.recorder.append(episode.digest(), action.encode(),
                                        reward, done)
            return payload

        if cmd == "start_recording":
            return self._start_recording(frame, session)

        if cmd == "stop_recording":
            if session.recorder is None:
                raise ProtocolError("recording_error", "no recording in progress")
            path = session.recorder.path
            session.recorder.close()
            session.recorder = None
            return {"recording": None, "path": str(path)}

        raise ProtocolError("unknown_command", f"unhandled cmd {cmd!r}")

    def _start_recording(self, frame: dict, session: _Session) -> dict:
        episode = session.episode
        if session.recorder is not None:
            raise ProtocolError("recording_error", "recording already in progress")
        if episode.step_count != 0:
            raise ProtocolError("recording_error",
                                "recording must start at step 0, right after reset")
        name = frame.get("path")
        if not isinstance(name, str) or not name:
            raise ProtocolError("recording_error", "start_recording needs a 'path'")
        if self.record_dir is None:
            raise ProtocolError("recording_error",
                                "server started without --record-dir")
        candidate = (self.record_dir / name).resolve()
        if not str(candidate).startswith(str(self.record_dir.resolve()) + os.sep):
            raise ProtocolError("recording_error",
                                "recording path escapes the record directory")
        candidate.parent.mkdir(parents=True, exist_ok=True)
        task_name = episode.task.name if episode.mode == "discrete" else episode.task_name
        session.recorder = TrajectoryRecorder.create(
            candidate, task=task_name, scene=episode.scene_name, seed=episode.seed,
            mode=episode.mode, initial_digest=episode.digest(),
            tick_dt=0.01 if episode.mode == "continuous" else None)
        return {"recording": str(candidate)}


def run_server(host: str, port: int, scene_dir: str | None, max_sessions: int,
               record_dir: str | None) -> None:
    _setup_logging()
    server = KitchenServer(host=host, port=port, scene_dir=scene_dir,
                           max_sessions=max_sessions, record_dir=record_dir)
    print(f"kitchensim server listening on {server.address[0]}:{server.address[1]}",
          flush=True)
    server.serve_forever()
