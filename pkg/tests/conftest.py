"""Shared fixtures: one scene library and cached optimal plans per session."""

from __future__ import annotations

import pytest

from kitchensim.planner import optimal_plan
from kitchensim.sceneconf import SceneLibrary
from kitchensim.tasks import get_task

GOLDEN_SEED = 7


@pytest.fixture(scope="session")
def library() -> SceneLibrary:
    return SceneLibrary()


@pytest.fixture(scope="session")
def kitchen_a(library):
    return library.load("kitchen_a", GOLDEN_SEED)


class PlanCache:
    def __init__(self, library: SceneLibrary):
        self.library = library
        self._plans: dict = {}

    def plan(self, scene: str, task: str, seed: int = GOLDEN_SEED):
        key = (scene, task, seed)
        if key not in self._plans:
            state = self.library.load(scene, seed)
            self._plans[key] = optimal_plan(state, get_task(task))
        return self._plans[key]


@pytest.fixture(scope="session")
def plans(library) -> PlanCache:
    return PlanCache(library)
