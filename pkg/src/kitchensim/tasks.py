"""Dish tasks: goal predicates, satisfaction checking, reward schedule.

A goal predicate asks for *some* ingredient of a set to carry all required
state flags while sitting in an instance of the target receptacle class.
Distinct predicates must be witnessed by distinct ingredients, so
satisfaction is an injective assignment problem; we solve it with a small
augmenting-path matching. The juice task additionally requires both fruits
to share one cup instance.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import catalog
from .errors import ConfigError
from .textconf import ConfigDoc, parse_float
from .world import WorldState

MAX_STEPS_DISCRETE = 1000
SUBGOAL_REWARD = 1.0
COMPLETION_BONUS = 10.0


@dataclass(frozen=True, slots=True)
class GoalPredicate:
    set_name: str
    required_states: int  # catalog state bitmask; 0 = mere presence
    target_cls: str

    def describe(self) -> str:
        states = ",".join(catalog.mask_to_states(self.required_states)) or "present"
        return f"{self.set_name}[{states}] in {self.target_cls}"


@dataclass(frozen=True)
class TaskSpec:
    name: str
    predicates: tuple[GoalPredicate, ...]
    difficulty: str  # easy | medium | hard
    subgoal_reward: float = SUBGOAL_REWARD
    completion_bonus: float = COMPLETION_BONUS
    max_steps: int = MAX_STEPS_DISCRETE
    # True: all predicates must be witnessed inside one shared receptacle
    # instance (fruit juice's "the same cup").
    same_target_instance: bool = False

    def full_mask(self) -> int:
        return (1 << len(self.predicates)) - 1


def _pred(set_name: str, states: tuple[str, ...], target: str) -> GoalPredicate:
    return GoalPredicate(set_name=set_name, required_states=catalog.states_to_mask(list(states)),
                         target_cls=target)


BUILTIN_TASKS: dict[str, TaskSpec] = {
    "fruit_juice": TaskSpec(
        name="fruit_juice",
        predicates=(_pred("fruit", ("cut", "juiced"), "cup"),
                    _pred("fruit", ("cut", "juiced"), "cup")),
        difficulty="easy",
        same_target_instance=True,
    ),
    "roast_meat": TaskSpec(
        name="roast_meat",
        predicates=(_pred("fruit", ("cut", "juiced", "cooked"), "pot"),
                    _pred("meat", ("cooked",), "pot")),
        difficulty="medium",
    ),
    "stew": TaskSpec(
        name="stew",
        predicates=(_pred("vegetable", ("cut", "cooked"), "pot"),
                    _pred("meat", ("cooked",), "pot")),
        difficulty="medium",
    ),
    "pizza": TaskSpec(
        name="pizza",
        predicates=(_pred("vegetable", ("cut", "cooked"), "plate"),
                    _pred("coldcut", ("cooked",), "plate"),
                    _pred("cheese", ("cooked",), "plate"),
                    _pred("sauce", ("cooked",), "plate"),
                    _pred("dough", ("cooked",), "plate")),
        difficulty="hard",
    ),
    "sandwich": TaskSpec(
        name="sandwich",
        predicates=(_pred("vegetable", ("cut",), "plate"),
                    _pred("sauce", (), "plate"),
                    _pred("coldcut", ("cooked",), "plate"),
                    _pred("cheese", ("cooked",), "plate"),
                    _pred("bread", ("cooked",), "plate")),
        difficulty="hard",
    ),
}

DISCRETE_TASKS = tuple(BUILTIN_TASKS)


def get_task(name: str) -> TaskSpec:
    if name not in BUILTIN_TASKS:
        raise ConfigError(f"unknown task {name!r}; have {', '.join(BUILTIN_TASKS)}")
    return BUILTIN_TASKS[name]


def _contained_by_set(w: WorldState) -> dict[str, list[tuple[int, int, int]]]:
    """One pass over objects: set name -> [(ingredient id, states, rid)]."""
    out: dict[str, list[tuple[int, int, int]]] = {}
    for o in w.objects:
        if o.kind == "ingredient" and o.loc[0] == "in":
            out.setdefault(o.set_name, []).append((o.id, o.states, o.loc[1]))
    return out


def _max_matching(candidates: list[list[int]]) -> int:
    """Bitmap of predicate indices matched in a maximum injective matching.

    Greedy augmenting paths, processed in predicate order, so the returned
    bitmap is deterministic.
    """
    owner: dict[int, int] = {}  # ingredient id -> predicate index

    def augment(pi: int, seen: set[int]) -> bool:
        for ing in candidates[pi]:
            if ing in seen:
                continue
            seen.add(ing)
            if ing not in owner or augment(owner[ing], seen):
                owner[ing] = pi
                return True
        return False

    for pi in range(len(candidates)):
        augment(pi, set())
    bitmap = 0
    for pi in set(owner.values()):
        bitmap |= 1 << pi
    return bitmap


def goal_bitmap(w: WorldState, t: TaskSpec) -> int:
    """Bitmask of currently satisfied predicates (instantaneous, not latched)."""
    contained = _contained_by_set(w)
    objs = w.objects

    def witnesses(pred: GoalPredicate, rid_filter: int | None = None) -> list[int]:
        req = pred.required_states
        out = []
        for oid, states, rid in contained.get(pred.set_name, ()):
            if states & req != req:
                continue
            if rid_filter is not None and rid != rid_filter:
                continue
            if objs[rid - 1].cls != pred.target_cls:
                continue
            out.append(oid)
        return out

    if t.same_target_instance:
        target_cls = t.predicates[0].target_cls
        best = 0
        for recv in objs:
            if recv.kind != "receptacle" or recv.cls != target_cls:
                continue
            bitmap = _max_matching([witnesses(p, recv.id) for p in t.predicates])
            if bin(bitmap).count("1") > bin(best).count("1"):
                best = bitmap
        return best
    return _max_matching([witnesses(p) for p in t.predicates])


def goal_satisfied(w: WorldState, t: TaskSpec) -> tuple[bool, int]:
    bitmap = goal_bitmap(w, t)
    return bitmap == t.full_mask(), bitmap


def reward_delta(prev_bitmap: int, new_bitmap: int, t: TaskSpec) -> float:
    """Reward for newly satisfied predicates, plus the completion bonus."""
    if prev_bitmap & ~new_bitmap:
        raise AssertionError(
            f"goal bitmap lost bits ({prev_bitmap:#x} -> {new_bitmap:#x}); engine bug")
    gained = bin(new_bitmap & ~prev_bitmap).count("1")
    reward = gained * t.subgoal_reward
    if new_bitmap == t.full_mask() and prev_bitmap != t.full_mask():
        reward += t.completion_bonus
    return reward


def task_from_doc(doc: ConfigDoc) -> TaskSpec:
    """Build a TaskSpec from a config document's [task] section.

    Either ``name = <builtin>`` alone, or a custom definition::

        [task]
        name = my_task
        difficulty = easy
        goal1 = fruit cut,juiced -> cup
        goal2 = sauce -> plate
        same_target_instance = true
    """
    entries = doc.section_map("task")
    if "name" not in entries:
        raise doc.error("[task] must define name", doc.section_lines.get("task"))
    name = entries["name"].value
    goal_entries = [e for e in doc.require_section("task") if e.key.startswith("goal")]
    if not goal_entries:
        return get_task(name)

    predicates = []
    for entry in goal_entries:
        text = entry.value
        if "->" not in text:
            raise doc.error(f"expected '<set> [states] -> <receptacle>', got {text!r}",
                            entry.line)
        left, target = (part.strip() for part in text.split("->", 1))
        parts = left.split()
        set_name = parts[0]
        if set_name not in catalog.INGREDIENT_SETS:
            raise doc.error(f"unknown ingredient set {set_name!r}", entry.line)
        mask = 0
        if len(parts) > 1:
            for flag in parts[1].split(","):
                flag = flag.strip()
                if flag not in catalog.STATE_BIT:
                    raise doc.error(f"unknown state flag {flag!r}", entry.line)
                mask |= catalog.STATE_BIT[flag]
        if mask & ~catalog.ALLOWED_STATES[set_name]:
            raise doc.error(f"state not allowed for set {set_name!r}", entry.line)
        if target not in catalog.RECEPTACLE_CAPACITY:
            raise doc.error(f"unknown receptacle class {target!r}", entry.line)
        predicates.append(GoalPredicate(set_name, mask, target))

    difficulty = entries["difficulty"].value if "difficulty" in entries else "medium"
    if difficulty not in ("easy", "medium", "hard"):
        raise doc.error("difficulty must be easy, medium or hard",
                        entries["difficulty"].line)
    subgoal = parse_float(doc, entries["subgoal_reward"]) if "subgoal_reward" in entries \
        else SUBGOAL_REWARD
    bonus = parse_float(doc, entries["completion_bonus"]) if "completion_bonus" in entries \
        else COMPLETION_BONUS
    same = False
    if "same_target_instance" in entries:
        same = entries["same_target_instance"].value.lower() in ("true", "yes", "1")
        if same and len({p.target_cls for p in predicates}) != 1:
            raise doc.error("same_target_instance requires a single target class",
                            entries["same_target_instance"].line)
    return TaskSpec(name=name, predicates=tuple(predicates), difficulty=difficulty,
                    subgoal_reward=subgoal, completion_bonus=bonus,
                    same_target_instance=same)
