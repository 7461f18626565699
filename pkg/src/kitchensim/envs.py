"""Episode lifecycle shared by the server, the bench harness, and replay.

An episode owns one environment instance from reset to termination and
knows how to produce observation payloads and state digests. Discrete
episodes wrap the atomic-action engine; continuous episodes wrap the
tool-use simulator.
"""

from __future__ import annotations

from dataclasses import replace

from . import tooluse
from .actions import Action, StepResult, legal_actions, step_discrete
from .errors import ConfigError, EpisodeOver
from .observe import discrete_payload
from .sceneconf import SceneLibrary
from .tasks import DISCRETE_TASKS, get_task, goal_bitmap
from .tooluse import (ContinuousScene, HandAction, HandState, TOOLUSE_TASKS,
                      continuous_digest, load_tooluse_text, observe_continuous,
                      step_continuous)
from .world import state_digest_hex


class DiscreteEpisode:
    mode = "discrete"

    def __init__(self, library: SceneLibrary, task_name: str, scene_name: str, seed: int):
        self.task = get_task(task_name)
        self.scene_name = scene_name
        self.seed = seed
        state = library.load(scene_name, seed)
        # Pre-satisfied predicates count as progress but never pay reward.
        bitmap = goal_bitmap(state, self.task)
        self.state = replace(state, goal_latched=bitmap)
        self.last_reward = 0.0
        self.last_bitmap = bitmap
        self.done = bitmap == self.task.full_mask()
        self.done_reason = "success" if self.done else None

    def step(self, action: Action) -> StepResult:
        if self.done:
            raise EpisodeOver(f"episode finished ({self.done_reason})")
        result = step_discrete(self.state, action, self.task)
        self.state = result.next_state
        self.last_reward = result.reward
        if result.goal_bitmap is not None:
            self.last_bitmap = result.goal_bitmap
        self.done = result.done
        self.done_reason = result.done_reason
        return result

    def legal_actions(self) -> list[Action]:
        return legal_actions(self.state)

    def digest(self) -> str:
        return state_digest_hex(self.state)

    def payload(self, with_raster: bool = False) -> dict:
        return discrete_payload(
            self.state, self.task, scene_name=self.scene_name, seed=self.seed,
            reward=self.last_reward, done=self.done, done_reason=self.done_reason,
            inst_bitmap=self.last_bitmap, with_raster=with_raster)

    @property
    def step_count(self) -> int:
        return self.state.step

    @property
    def success(self) -> bool:
        return self.done_reason == "success"


class ContinuousEpisode:
    mode = "continuous"

    def __init__(self, library: SceneLibrary, task_name: str, scene_name: str, seed: int):
        if task_name not in TOOLUSE_TASKS:
            raise ConfigError(f"unknown tool-use task {task_name!r}")
        if library.kind(scene_name) != "tooluse":
            raise ConfigError(f"scene {scene_name!r} is not a tool-use layout")
        self.task_name = task_name
        self.scene_name = scene_name
        self.seed = seed  # recorded for headers; the dynamics draw nothing
        scene, hand = load_tooluse_text(library.text(scene_name), source=scene_name)
        if scene.task != task_name:
            raise ConfigError(
                f"scene {scene_name!r} is for task {scene.task!r}, not {task_name!r}")
        self.scene: ContinuousScene = scene
        self.hand: HandState = hand
        self.last_reward = 0.0
        self.total_reward = 0.0
        self.done = False
        self.goal_met = False

    def step(self, action: HandAction) -> tuple[float, bool]:
        if self.done:
            raise EpisodeOver("episode finished")
        scene, hand, reward, done = step_continuous(self.scene, self.hand, action)
        self.scene, self.hand = scene, hand
        self.last_reward = reward
        self.total_reward += reward
        self.done = done
        if done:
            self.goal_met = self._goal_now(scene)
        return reward, done

    def _goal_now(self, scene: ContinuousScene) -> bool:
        if scene.task == "cutting" or scene.task == "can_opening":
            return all(scene.flags)
        if scene.task == "peeling":
            return sum(scene.flags) >= tooluse.PEEL_NEEDED
        if scene.task == "pouring":
            return scene.prop_named("cup_target").fill > tooluse.FILL_DONE
        return scene.prop_named("cup").fill > tooluse.FILL_DONE

    def digest(self) -> str:
        return continuous_digest(self.scene, self.hand).hex()

    def payload(self, with_raster: bool = False) -> dict:
        return {
            "proto_version": 1,
            "mode": "continuous",
            "task": self.task_name,
            "scene": self.scene_name,
            "seed": self.seed,
            "step": self.scene.step,
            "hand": {
                "position": list(self.hand.position),
                "orientation": list(self.hand.orientation),
                "grabbed": self.hand.grabbed,
            },
            "observation": list(observe_continuous(self.scene, self.hand)),
            "progress": {
                "took_tool": self.scene.took_tool,
                "flags": [bool(f) for f in self.scene.flags],
                "fills": {p.name: p.fill for p in self.scene.props
                          if p.fill is not None},
            },
            "reward": self.last_reward,
            "done": self.done,
            "done_reason": ("success" if self.goal_met else "timeout") if self.done else None,
            "raster": None,
            "rgb": None,
            "depth": None,
        }

    @property
    def step_count(self) -> int:
        return self.scene.step

    @property
    def success(self) -> bool:
        return self.done and self.goal_met


def make_episode(library: SceneLibrary, task_name: str, scene_name: str | None,
                 seed: int):
    """Instantiate the right episode type for a task name."""
    if task_name in DISCRETE_TASKS:
        return DiscreteEpisode(library, task_name, scene_name or "kitchen_a", seed)
    if task_name in TOOLUSE_TASKS:
        return ContinuousEpisode(library, task_name, scene_name or f"tool_{task_name}",
                                 seed)
    known = ", ".join(DISCRETE_TASKS + TOOLUSE_TASKS)
    raise ConfigError(f"unknown task {task_name!r}; known tasks: {known}")
