"""Wire protocol framing, server state machine, isolation, and fuzz."""

import json
import random
import socket
import struct
from pathlib import Path

import pytest

from kitchensim import protocol
from kitchensim.errors import ProtocolError
from kitchensim.server import KitchenServer

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture()
def server(tmp_path):
    srv = KitchenServer(record_dir=str(tmp_path / "rec"))
    srv.start()
    yield srv
    srv.shutdown()


class Client:
    def __init__(self, address, session="s"):
        self.sock = socket.create_connection(address)
        self.sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self.session = session
        self.seq = 0

    def send(self, cmd, **kw):
        self.seq += 1
        frame = {"proto_version": 1, "session": self.session, "seq": self.seq,
                 "cmd": cmd, **kw}
        protocol.write_frame(self.sock, frame)
        return protocol.read_frame(self.sock)

    def send_raw(self, frame):
        protocol.write_frame(self.sock, frame)
        return protocol.read_frame(self.sock)

    def close(self):
        self.sock.close()


def test_frame_roundtrip_identity_golden():
    frames = json.loads((GOLDEN / "frames.json").read_text())
    for frame in frames:
        encoded = protocol.encode_frame(frame)
        decoded = protocol.decode_frame(encoded[4:])
        assert decoded == frame
        assert protocol.encode_frame(decoded) == encoded


def test_decode_rejects_garbage():
    with pytest.raises(ProtocolError):
        protocol.decode_frame(b"\xff\x00 garbage")
    with pytest.raises(ProtocolError):
        protocol.decode_frame(b"[1,2,3]")


def test_step_before_reset_is_error(server):
    c = Client(server.address)
    r = c.send("step_discrete", action={"type": "turn"})
    assert not r["ok"] and r["error"]["code"] == "no_episode"
    c.close()


def test_unknown_task_and_scene(server):
    c = Client(server.address)
    r = c.send("reset", task="souffle", seed=1)
    assert not r["ok"] and r["error"]["code"] == "unknown_task"
    assert "fruit_juice" in r["error"]["message"]
    r = c.send("reset", task="fruit_juice", scene="kitchen_z", seed=1)
    assert not r["ok"] and r["error"]["code"] == "unknown_scene"
    # session survives errors
    r = c.send("reset", task="fruit_juice", scene="kitchen_a", seed=1)
    assert r["ok"]
    c.close()


def test_sequence_must_increase(server):
    c = Client(server.address)
    r = c.send("reset", task="fruit_juice", scene="kitchen_a", seed=1)
    assert r["ok"]
    r = c.send_raw({"proto_version": 1, "session": "s", "seq": 1,
                    "cmd": "legal_actions"})
    assert not r["ok"] and r["error"]["code"] == "bad_sequence"
    # strictly increasing continues to work
    r = c.send("legal_actions")
    assert r["ok"]
    c.close()


def test_session_binding(server):
    c = Client(server.address, session="alpha")
    assert c.send("reset", task="fruit_juice", scene="kitchen_a", seed=1)["ok"]
    r = c.send_raw({"proto_version": 1, "session": "beta", "seq": 99,
                    "cmd": "legal_actions"})
    assert not r["ok"] and r["error"]["code"] == "bad_session"
    c.close()


def test_identical_sessions_identical_byte_streams(server):
    """Two sessions, same commands -> byte-identical payload streams."""
    streams = []
    for session in ("one", "two"):
        c = Client(server.address, session=session)
        chunks = []
        r = c.send("reset", task="fruit_juice", scene="kitchen_a", seed=7)
        chunks.append(json.dumps(r["payload"], sort_keys=True))
        for target in (1, 1):
            r = c.send("step_discrete", action={"type": "navigate", "target": target})
            chunks.append(json.dumps(r["payload"], sort_keys=True))
        r = c.send("observe")
        chunks.append(json.dumps(r["payload"], sort_keys=True))
        streams.append("\n".join(chunks))
        c.close()
    assert streams[0] == streams[1]


def test_session_isolation_interleaved(server):
    a = Client(server.address, session="a")
    b = Client(server.address, session="b")
    a.send("reset", task="fruit_juice", scene="kitchen_a", seed=7)
    b.send("reset", task="fruit_juice", scene="kitchen_a", seed=123)
    # interleave: a acts, b observes; b's world must not move
    before = b.send("observe")["payload"]
    for _ in range(4):
        a.send("step_discrete", action={"type": "turn"})
    after = b.send("observe")["payload"]
    assert before == after
    # and a's steps advanced only a
    assert a.send("observe")["payload"]["step"] == 4
    a.close()
    b.close()


def test_mode_mismatch(server):
    c = Client(server.address)
    c.send("reset", task="cutting", seed=1)
    r = c.send("step_discrete", action={"type": "turn"})
    assert not r["ok"] and r["error"]["code"] == "mode_mismatch"
    r = c.send("legal_actions")
    assert not r["ok"] and r["error"]["code"] == "mode_mismatch"
    r = c.send("step_continuous", action={"type": "hand", "dx": 0.01})
    assert r["ok"]
    assert r["payload"]["step"] == 1
    c.close()


def test_continuous_over_the_wire(server):
    c = Client(server.address)
    r = c.send("reset", task="pouring", seed=0)
    assert r["ok"] and r["payload"]["mode"] == "continuous"
    assert len(r["payload"]["observation"]) == 18
    c.close()


def test_bad_action_reported(server):
    c = Client(server.address)
    c.send("reset", task="fruit_juice", scene="kitchen_a", seed=1)
    r = c.send("step_discrete", action={"type": "fly"})
    assert not r["ok"] and r["error"]["code"] == "bad_action"
    r = c.send("step_discrete", action={"type": "take", "target": 99999})
    assert not r["ok"] and r["error"]["code"] == "bad_action"
    c.close()


def test_step_after_done_is_error(server):
    c = Client(server.address)
    c.send("reset", task="cutting", seed=1)
    for _ in range(50):
        r = c.send("step_continuous", action={"type": "hand"})
        assert r["ok"]
    r = c.send("step_continuous", action={"type": "hand"})
    assert not r["ok"] and r["error"]["code"] == "episode_done"
    c.close()


def test_recording_path_escape_rejected(server):
    c = Client(server.address)
    c.send("reset", task="fruit_juice", scene="kitchen_a", seed=1)
    r = c.send("start_recording", path="../evil.traj")
    assert not r["ok"] and r["error"]["code"] == "recording_error"
    r = c.send("start_recording", path="/tmp/evil.traj")
    assert not r["ok"]
    c.close()


def test_recording_must_start_at_step_zero(server):
    c = Client(server.address)
    c.send("reset", task="fruit_juice", scene="kitchen_a", seed=1)
    c.send("step_discrete", action={"type": "turn"})
    r = c.send("start_recording", path="late.traj")
    assert not r["ok"] and r["error"]["code"] == "recording_error"
    c.close()


def test_protocol_fuzz_survives_garbage(server):
    """Random well-framed garbage never kills the session or the server."""
    rng = random.Random(99)
    c = Client(server.address, session="fuzz")
    for i in range(2000):
        choice = rng.randrange(4)
        if choice == 0:
            body = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 40)))
        elif choice == 1:
            body = json.dumps(rng.choice([
                [], 42, "zzz", {"cmd": "reset"}, {"proto_version": 9},
                {"proto_version": 1, "session": "fuzz", "seq": "x", "cmd": "observe"},
            ])).encode()
        elif choice == 2:
            body = json.dumps({"proto_version": 1, "session": "fuzz",
                               "seq": 10 ** 6 + i,
                               "cmd": rng.choice(["observe", "nonsense", "reset"]),
                               "task": rng.choice(["fruit_juice", "bad"]),
                               "seed": rng.choice([1, "x"])}).encode()
        else:
            body = json.dumps({"proto_version": 1, "session": "fuzz",
                               "seq": 10 ** 6 + i, "cmd": "step_discrete",
                               "action": rng.choice(
                                   [None, {}, {"type": "take", "target": -4},
                                    {"type": "use"}, "turn"])}).encode()
        c.sock.sendall(struct.pack(">I", len(body)) + body)
        reply = protocol.read_frame(c.sock)
        assert isinstance(reply, dict) and "ok" in reply
    # the server still works afterwards
    r = c.send_raw({"proto_version": 1, "session": "fuzz", "seq": 10 ** 7,
                    "cmd": "reset", "task": "fruit_juice", "scene": "kitchen_a",
                    "seed": 3})
    assert r["ok"]
    c.close()


def test_oversized_frame_gets_error_then_close(server):
    sock = socket.create_connection(server.address)
    sock.sendall(struct.pack(">I", protocol.MAX_FRAME + 1))
    reply = protocol.read_frame(sock)
    assert reply is not None and not reply["ok"]
    assert reply["error"]["code"] == "bad_frame"
    sock.close()


def test_max_sessions_refused(tmp_path):
    srv = KitchenServer(max_sessions=1)
    srv.start()
    try:
        a = Client(srv.address, session="a")
        assert a.send("reset", task="fruit_juice", scene="kitchen_a", seed=1)["ok"]
        b_sock = socket.create_connection(srv.address)
        reply = protocol.read_frame(b_sock)
        assert reply is not None and reply["error"]["code"] == "busy"
        a.close()
        b_sock.close()
    finally:
        srv.shutdown()


def test_shutdown_command_stops_server():
    srv = KitchenServer()
    thread = srv.start()
    c = Client(srv.address)
    r = c.send("shutdown")
    assert r["ok"]
    thread.join(timeout=5)
    assert not thread.is_alive()
    c.close()
