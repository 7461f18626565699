"""Reference agents: random, scripted-optimal, tabular Q, scripted continuous.

The tabular Q agent learns over the planner's reduced symbolic key and
restricted action set; that compression is what makes the easy dish
tractable for a lookup table while the hard dishes stay out of reach,
mirroring the benchmark's convergence ordering.
"""

from __future__ import annotations

import random

from .actions import Action, TURN
from .envs import ContinuousEpisode, DiscreteEpisode
from .errors import ConfigError
from .planner import _PlanModel, optimal_plan
from .tooluse import scripted_policy


class RandomAgent:
    """Uniform choice over the full legal action set."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def begin_episode(self, episode: DiscreteEpisode) -> None:
        pass

    def act(self, episode: DiscreteEpisode) -> Action:
        return self.rng.choice(episode.legal_actions())

    def observe(self, *_args) -> None:
        pass


class ScriptedOptimalAgent:
    """Executes the planner's shortest action sequence."""

    def __init__(self, seed: int = 0):
        self._plan: list[Action] = []
        self._cursor = 0
        self._cache: dict = {}

    def begin_episode(self, episode: DiscreteEpisode) -> None:
        cache_key = (episode.scene_name, episode.seed, episode.task.name)
        if cache_key not in self._cache:
            self._cache[cache_key] = optimal_plan(episode.state, episode.task)
        self._plan = self._cache[cache_key]
        self._cursor = 0

    def act(self, episode: DiscreteEpisode) -> Action:
        if self._cursor >= len(self._plan):
            return TURN  # plan exhausted without success; should not happen
        action = self._plan[self._cursor]
        self._cursor += 1
        return action

    def observe(self, *_args) -> None:
        pass


class TabularQAgent:
    """Epsilon-greedy Q-learning over reduced symbolic observations."""

    def __init__(self, seed: int, epsilon_start: float = 0.1,
                 epsilon_end: float = 0.01, alpha: float = 0.1,
                 discount: float = 0.99, episodes: int = 1):
        self.rng = random.Random(seed)
        self.epsilon_start = epsilon_start
        self.epsilon_end = epsilon_end
        self.alpha = alpha
        self.discount = discount
        self.episodes = max(1, episodes)
        self.episode_index = -1
        self.q: dict = {}
        self._model: _PlanModel | None = None
        self._action_cache: dict = {}
        self._last: tuple | None = None

    def begin_episode(self, episode: DiscreteEpisode) -> None:
        if self._model is None:
            self._model = _PlanModel(episode.state, episode.task)
        self.episode_index += 1
        self._last = None
        self._pending_key = None

    @property
    def epsilon(self) -> float:
        if self.episodes <= 1:
            return self.epsilon_end
        frac = min(1.0, self.episode_index / (self.episodes - 1))
        return self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac

    def _actions_for(self, key, state) -> list[Action]:
        cached = self._action_cache.get(key)
        if cached is None:
            cached = self._model.actions(state) or [TURN]
            self._action_cache[key] = cached
        return cached

    def act(self, episode: DiscreteEpisode) -> Action:
        state = episode.state
        # observe() already keyed this state; reuse instead of rebuilding.
        key = self._pending_key if self._pending_key is not None \
            else self._model.key(state)
        self._pending_key = None
        actions = self._actions_for(key, state)
        if self.rng.random() < self.epsilon:
            action = self.rng.choice(actions)
        else:
            qrow = self.q.get(key)
            if qrow is None:
                action = self.rng.choice(actions)
            else:
                best = max(qrow.get(a, 0.0) for a in actions)
                ties = [a for a in actions if qrow.get(a, 0.0) == best]
                action = ties[0] if len(ties) == 1 else self.rng.choice(ties)
        self._last = (key, action)
        return action

    def observe(self, episode: DiscreteEpisode, reward: float, done: bool) -> None:
        if self._last is None:
            return
        key, action = self._last
        nkey = self._model.key(episode.state)
        self._pending_key = nkey
        qrow = self.q.setdefault(key, {})
        old = qrow.get(action, 0.0)
        if done:
            target = reward
        else:
            nactions = self._actions_for(nkey, episode.state)
            nrow = self.q.get(nkey)
            best_next = max((nrow.get(a, 0.0) for a in nactions), default=0.0) \
                if nrow else 0.0
            target = reward + self.discount * best_next
        qrow[action] = old + self.alpha * (target - old)


class ScriptedContinuousAgent:
    """Wraps the per-task scripted controller."""

    def __init__(self, seed: int = 0):
        self._policy = None

    def begin_episode(self, episode: ContinuousEpisode) -> None:
        self._policy = scripted_policy(episode.task_name)

    def act(self, episode: ContinuousEpisode):
        return self._policy(episode.scene, episode.hand)

    def observe(self, *_args) -> None:
        pass


AGENT_KINDS = ("random", "scripted_optimal", "tabular_q", "scripted_continuous")


def make_agent(kind: str, seed: int, *, episodes: int = 1,
               epsilon_start: float = 0.1, epsilon_end: float = 0.01,
               alpha: float = 0.1, discount: float = 0.99):
    if kind == "random":
        return RandomAgent(seed)
    if kind == "scripted_optimal":
        return ScriptedOptimalAgent(seed)
    if kind == "tabular_q":
        return TabularQAgent(seed, epsilon_start=epsilon_start,
                             epsilon_end=epsilon_end, alpha=alpha,
                             discount=discount, episodes=episodes)
    if kind == "scripted_continuous":
        return ScriptedContinuousAgent(seed)
    raise ConfigError(f"unknown agent {kind!r}; have {', '.join(AGENT_KINDS)}")
