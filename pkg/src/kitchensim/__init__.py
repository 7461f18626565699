"""Deterministic headless kitchen task environment.

Discrete atomic-action cooking tasks with compositional goals, continuous
hand-control tool-use tasks, a length-prefixed JSON wire protocol server,
and a demonstration record/replay pipeline.
"""

from .actions import Action, StepResult, decode_action, legal_actions, step_discrete
from .errors import (ConfigError, EpisodeOver, KitchenSimError, LayoutError,
                     PlanningError, ProtocolError, TrajectoryError)
from .planner import optimal_plan
from .sceneconf import (SceneLibrary, bundled_scene_text, generate_scene,
                        load_scene_file, load_scene_text)
from .tasks import (BUILTIN_TASKS, GoalPredicate, TaskSpec, get_task,
                    goal_satisfied, reward_delta)
from .world import (AgentPose, ObjectInstance, WorldState, affordance_check,
                    state_digest, state_digest_hex)

__version__ = "0.1.0"

__all__ = [
    "Action", "AgentPose", "BUILTIN_TASKS", "ConfigError", "EpisodeOver",
    "GoalPredicate", "KitchenSimError", "LayoutError", "ObjectInstance",
    "PlanningError", "ProtocolError", "SceneLibrary", "StepResult", "TaskSpec",
    "TrajectoryError", "WorldState", "affordance_check", "bundled_scene_text",
    "decode_action", "generate_scene", "get_task", "goal_satisfied",
    "legal_actions", "load_scene_file", "load_scene_text", "optimal_plan",
    "reward_delta", "state_digest", "state_digest_hex", "step_discrete",
]
