"""Client tests against a real server process reached only over the wire."""

import json
import re
import subprocess
import sys
from pathlib import Path

import pytest

from kitchensim_client import ClientError, EnvHandle, ServerError, decode_frame, \
    encode_frame

GOLDEN_FRAMES = Path(__file__).resolve().parents[2] / "tests" / "golden" / "frames.json"

# The pinned optimal fruit-juice plan for kitchen_a seed 7 (object ids:
# 1 fridge, 3 knife, 4 cup, 5 juicer; 14/15 the two oranges).
JUICE_PLAN = [
    {"type": "navigate", "target": 1}, {"type": "toggle", "target": 1},
    {"type": "take", "target": 14}, {"type": "navigate", "target": 4},
    {"type": "put_into", "target": 4}, {"type": "navigate", "target": 1},
    {"type": "take", "target": 15}, {"type": "navigate", "target": 4},
    {"type": "put_into", "target": 4}, {"type": "navigate", "target": 3},
    {"type": "use", "target": 3}, {"type": "use", "target": 3},
    {"type": "navigate", "target": 5}, {"type": "use", "target": 5},
    {"type": "use", "target": 5},
]


@pytest.fixture(scope="module")
def server():
    proc = subprocess.Popen(
        [sys.executable, "-m", "kitchensim.cli", "serve", "--bind", "127.0.0.1:0"],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True)
    line = proc.stdout.readline()
    match = re.search(r"listening on ([\d.]+:\d+)", line)
    assert match, line
    yield match.group(1)
    proc.terminate()
    proc.wait(timeout=10)


def test_reset_twice_identical(server):
    with EnvHandle(server) as a, EnvHandle(server) as b:
        obs1 = a.reset("fruit_juice", "kitchen_a", 7)
        obs2 = b.reset("fruit_juice", "kitchen_a", 7)
        assert obs1 == obs2


def test_unknown_task_names_valid_ones(server):
    with EnvHandle(server) as env:
        with pytest.raises(ServerError) as err:
            env.reset("souffle")
        assert err.value.code == "unknown_task"
        assert "fruit_juice" in str(err.value)


def test_reset_observation_contains_fridge(server):
    with EnvHandle(server) as env:
        obs = env.reset("fruit_juice", "kitchen_a", 7)
        kinds = {(rec["kind"], rec["cls"]) for rec in obs["nearby"]}
        assert ("receptacle", "fridge") in kinds


def test_turn_four_times_restores_pose(server):
    with EnvHandle(server) as env:
        first = env.reset("fruit_juice", "kitchen_a", 7)
        for _ in range(4):
            obs, reward, done, info = env.step({"type": "turn"})
            assert reward == 0.0 and not done
        assert obs["agent"] == first["agent"]


def test_scripted_juice_plan_matches_bench_reward(server, tmp_path):
    """Cumulative client reward equals the bench harness's, bit-exactly."""
    config = tmp_path / "bench.conf"
    config.write_text("version = 1\n[bench]\ntask = fruit_juice\n"
                      "scene = kitchen_a\nagent = scripted_optimal\n"
                      "episodes = 1\nseeds = 7\n")
    outdir = tmp_path / "bench_out"
    subprocess.run([sys.executable, "-m", "kitchensim.cli", "bench", "run",
                    str(config), "-o", str(outdir)], check=True,
                   stdout=subprocess.DEVNULL)
    header, row = (outdir / "report.csv").read_text().splitlines()
    bench_reward = float(row.split(",")[2])

    with EnvHandle(server) as env:
        env.reset("fruit_juice", "kitchen_a", 7)
        total = 0.0
        done = False
        for action in JUICE_PLAN:
            obs, reward, done, info = env.step(action)
            total += reward
        assert done and info["done_reason"] == "success"
    assert total == bench_reward  # bit-exact, no tolerance


def test_done_at_step_1000_with_timeout(server):
    with EnvHandle(server) as env:
        env.reset("fruit_juice", "kitchen_a", 7)
        done = False
        steps = 0
        while not done:
            obs, _, done, info = env.step({"type": "turn"})
            steps += 1
        assert steps == 1000
        assert obs["step"] == 1000
        assert info["done_reason"] == "timeout"
        with pytest.raises(ClientError):
            env.step({"type": "turn"})


def test_continuous_episode_over_the_wire(server):
    with EnvHandle(server) as env:
        obs = env.reset("cutting", seed=0)
        assert env.mode == "continuous"
        obs, reward, done, _ = env.step({"type": "hand", "dx": 0.05})
        assert obs["step"] == 1 and reward == 0.0 and not done


def test_server_error_surfaces_message(server):
    with EnvHandle(server) as env:
        env.reset("fruit_juice", "kitchen_a", 7)
        with pytest.raises(ServerError) as err:
            env.step({"type": "take", "target": 424242})
        assert err.value.code == "bad_action"


def test_golden_frames_roundtrip():
    frames = json.loads(GOLDEN_FRAMES.read_text())
    for frame in frames:
        body = encode_frame(frame)[4:]
        assert decode_frame(body) == frame
        assert encode_frame(decode_frame(body)) == encode_frame(frame)


def test_sequence_numbers_strictly_increase(server):
    with EnvHandle(server) as env:
        env.reset("fruit_juice", "kitchen_a", 7)
        seqs = [env.seq]
        env.observe()
        seqs.append(env.seq)
        env.legal_actions()
        seqs.append(env.seq)
        assert seqs == sorted(set(seqs))
