#!/usr/bin/env python3
"""Regenerate the frozen golden artifacts under tests/golden/.

Run only when a deliberate format or scene change invalidates the pinned
values; review the diff carefully, since golden drift means every
previously recorded trajectory stops replaying.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

from kitchensim import protocol
from kitchensim.agents import ScriptedOptimalAgent
from kitchensim.demos import TrajectoryRecorder
from kitchensim.envs import ContinuousEpisode, DiscreteEpisode
from kitchensim.sceneconf import BUNDLED_SCENES, SceneLibrary
from kitchensim.tasks import DISCRETE_TASKS
from kitchensim.tooluse import HandAction, TOOLUSE_TASKS, scripted_policy
from kitchensim.world import state_digest_hex

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"
SEED = 7


def make_digests() -> None:
    library = SceneLibrary()
    digests = {name: state_digest_hex(library.load(name, SEED))
               for name in BUNDLED_SCENES}
    out = GOLDEN / "scene_digests.json"
    out.write_text(json.dumps({"seed": SEED, "digests": digests},
                              indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")


def make_demos() -> None:
    library = SceneLibrary()
    demo_dir = GOLDEN / "demos"
    demo_dir.mkdir(parents=True, exist_ok=True)
    for old in demo_dir.glob("*.traj*"):
        old.unlink()

    for task in DISCRETE_TASKS:
        agent = ScriptedOptimalAgent()
        for scene in BUNDLED_SCENES:
            episode = DiscreteEpisode(library, task, scene, SEED)
            agent.begin_episode(episode)
            path = demo_dir / f"{task}_{scene}.traj"
            rec = TrajectoryRecorder.create(
                path, task=task, scene=scene, seed=SEED, mode="discrete",
                initial_digest=episode.digest(), tick_dt=None)
            while not episode.done:
                action = agent.act(episode)
                result = episode.step(action)
                rec.append(episode.digest(), action.encode(), result.reward,
                           episode.done)
            rec.close()
            print(f"wrote {path} ({episode.step_count} steps)")

    for task in TOOLUSE_TASKS:
        for idle in (0, 3, 7):
            episode = ContinuousEpisode(SceneLibrary(), task, f"tool_{task}", SEED)
            policy = scripted_policy(task)
            suffix = "" if idle == 0 else f"_idle{idle}"
            ext = ".traj.gz" if idle == 7 else ".traj"
            path = demo_dir / f"{task}{suffix}{ext}"
            rec = TrajectoryRecorder.create(
                path, task=task, scene=f"tool_{task}", seed=SEED,
                mode="continuous", initial_digest=episode.digest(), tick_dt=0.01)
            remaining_idle = idle
            while not episode.done:
                if remaining_idle > 0:
                    action = HandAction()
                    remaining_idle -= 1
                else:
                    action = policy(episode.scene, episode.hand)
                reward, done = episode.step(action)
                rec.append(episode.digest(), action.encode(), reward, done)
            rec.close()
            print(f"wrote {path} ({episode.step_count} steps)")


def make_frames() -> None:
    """Golden wire frames: request/response pairs for round-trip tests."""
    frames = [
        {"proto_version": 1, "session": "golden", "seq": 1, "cmd": "reset",
         "task": "fruit_juice", "scene": "kitchen_a", "seed": 7},
        {"proto_version": 1, "session": "golden", "seq": 2, "cmd": "step_discrete",
         "action": {"type": "navigate", "target": 1}},
        {"proto_version": 1, "session": "golden", "seq": 3, "cmd": "step_continuous",
         "action": {"type": "hand", "dx": 0.05, "dy": -0.01, "dz": 0.0,
                    "dphi": 0.0, "dtheta": 0.2, "dpsi": 0.0, "gamma": 0.5}},
        {"proto_version": 1, "session": "golden", "seq": 4, "cmd": "observe",
         "obs": "raster"},
        {"proto_version": 1, "session": "golden", "seq": 5, "cmd": "legal_actions"},
        {"proto_version": 1, "session": "golden", "seq": 6, "cmd": "start_recording",
         "path": "demo.traj"},
        {"proto_version": 1, "session": "golden", "seq": 7, "cmd": "stop_recording"},
        {"proto_version": 1, "session": "golden", "seq": 8, "cmd": "shutdown"},
        protocol.ok_response("golden", 9, {"actions": [{"type": "turn"}]}),
        protocol.error_response("golden", 10, "no_episode", "no active episode"),
    ]
    out = GOLDEN / "frames.json"
    out.write_text(json.dumps(frames, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    t0 = time.time()
    GOLDEN.mkdir(parents=True, exist_ok=True)
    make_digests()
    make_frames()
    make_demos()
    print(f"done in {time.time() - t0:.1f}s")
