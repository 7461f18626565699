"""The six discrete atomic actions and their execution semantics.

"Near" means: the target's station cell is the cell directly in front of
the agent (4-neighborhood plus facing). Navigate is the only action that
moves the agent; it teleports along a shortest free-cell path to the best
adjacent cell of the target station and turns the agent towards it, all as
one action. A failed action changes nothing but the step counter.

``apply_action`` is the raw transition (no task bookkeeping) used by the
planner; ``step_discrete`` adds goal latching, rewards, and termination.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import catalog
from .tasks import TaskSpec, goal_bitmap
from .world import CLOCKWISE, AgentPose, ObjectInstance, WorldState, affordance_check

VERBS = ("take", "put_into", "use", "navigate", "toggle", "turn")
_VERB_RANK = {verb: i for i, verb in enumerate(VERBS)}

FAILURE_REASONS = ("not_near", "wrong_kind", "container_closed", "hands_full",
                   "hands_empty", "no_affordance", "capacity_full", "unreachable")


@dataclass(frozen=True, slots=True)
class Action:
    verb: str
    target: int = 0  # object id; unused for turn

    def sort_key(self) -> tuple[int, int]:
        return (_VERB_RANK[self.verb], self.target)

    def encode(self) -> dict:
        if self.verb == "turn":
            return {"type": "turn"}
        return {"type": self.verb, "target": self.target}


def decode_action(data: dict) -> Action:
    if not isinstance(data, dict) or "type" not in data:
        raise ValueError("action must be an object with a 'type' field")
    verb = data["type"]
    if verb not in VERBS:
        raise ValueError(f"unknown action type {verb!r}")
    if verb == "turn":
        return Action("turn")
    target = data.get("target")
    if not isinstance(target, int) or isinstance(target, bool) or target < 1:
        raise ValueError(f"action {verb!r} needs an integer 'target' object id")
    return Action(verb, target)


TURN = Action("turn")


@dataclass(frozen=True, slots=True)
class StepResult:
    next_state: WorldState
    reward: float
    events: tuple[str, ...]
    failed: bool
    failure_reason: str | None
    done: bool
    done_reason: str | None  # "success" | "timeout"
    # Post-step instantaneous goal bitmap; None when the action could not
    # have changed it (failures, navigate, toggle, turn).
    goal_bitmap: int | None = None


def _fail(w: WorldState, reason: str) -> tuple[WorldState, str | None]:
    return replace(w, step=w.step + 1), reason


def _receptacle_open(recv: ObjectInstance) -> bool:
    return not recv.is_container or bool(recv.open)


def _use_resolution(w: WorldState, tool: ObjectInstance) -> ObjectInstance | None:
    """The ingredient a Use of ``tool`` would transform, or None.

    Receptacles adjacent to the tool's station are scanned in ascending
    station id; within one receptacle, contents in ascending object id.
    Closed containers shield their contents.
    """
    tool_cell = w.scene.station_cells[tool.id]
    for rid in w.scene.adjacent_station_ids(tool_cell):
        recv = w.obj(rid)
        if recv.kind != "receptacle" or not _receptacle_open(recv):
            continue
        for ing in w.contents(rid):
            if ing.kind == "ingredient" and affordance_check(ing, tool.cls):
                return ing
    return None


def _sauce_target(w: WorldState, tool: ObjectInstance) -> ObjectInstance | None:
    """The receptacle a sauce bottle would squeeze into, or None."""
    tool_cell = w.scene.station_cells[tool.id]
    for rid in w.scene.adjacent_station_ids(tool_cell):
        recv = w.obj(rid)
        if recv.kind != "receptacle" or not _receptacle_open(recv):
            continue
        if len(w.contents(rid)) < recv.capacity:
            return recv
    return None


def apply_action(w: WorldState, a: Action) -> tuple[WorldState, str | None]:
    """Raw transition: (next state, failure reason or None).

    Raises ValueError for malformed actions (unknown verb or object id);
    precondition misses return a failure reason instead.
    """
    agent = w.agent
    if a.verb == "turn":
        nxt = replace(w, agent=AgentPose(agent.cell, CLOCKWISE[agent.facing]),
                      step=w.step + 1)
        return nxt, None

    target = w.get(a.target)
    if target is None:
        raise ValueError(f"action references unknown object id {a.target}")

    if a.verb == "navigate":
        if target.kind == "ingredient":
            return _fail(w, "wrong_kind")
        dest = w.scene.nav_destination(target.id, agent.cell)
        if dest is None:
            return _fail(w, "unreachable")
        nxt = replace(w, agent=AgentPose(dest[0], dest[1]), step=w.step + 1)
        return nxt, None

    faced = w.faced_station()

    if a.verb == "take":
        if target.kind != "ingredient":
            return _fail(w, "wrong_kind")
        if faced is None or faced.kind != "receptacle" or target.loc != ("in", faced.id):
            return _fail(w, "not_near")
        if faced.is_container and not faced.open:
            return _fail(w, "container_closed")
        if w.held_id() is not None:
            return _fail(w, "hands_full")
        nxt = w.with_objects([replace(target, loc=("held",))], step=w.step + 1)
        return nxt, None

    if a.verb == "put_into":
        if target.kind != "receptacle":
            return _fail(w, "wrong_kind")
        if faced is None or faced.id != target.id:
            return _fail(w, "not_near")
        held = w.held_id()
        if held is None:
            return _fail(w, "hands_empty")
        if target.is_container and not target.open:
            return _fail(w, "container_closed")
        if len(w.contents(target.id)) >= target.capacity:
            return _fail(w, "capacity_full")
        nxt = w.with_objects([replace(w.obj(held), loc=("in", target.id))],
                             step=w.step + 1)
        return nxt, None

    if a.verb == "use":
        if target.kind != "tool":
            return _fail(w, "wrong_kind")
        if faced is None or faced.id != target.id:
            return _fail(w, "not_near")
        if target.cls == catalog.SPAWNS_SAUCE:
            recv = _sauce_target(w, target)
            if recv is None:
                return _fail(w, "no_affordance")
            sauce = ObjectInstance(id=w.next_object_id(), kind="ingredient",
                                   cls=target.spawn_variant, set_name="sauce",
                                   loc=("in", recv.id))
            nxt = replace(w, objects=w.objects + (sauce,), step=w.step + 1)
            return nxt, None
        ing = _use_resolution(w, target)
        if ing is None:
            return _fail(w, "no_affordance")
        effect = catalog.TOOL_EFFECT[target.cls]
        nxt = w.with_objects([replace(ing, states=ing.states | effect)],
                             step=w.step + 1)
        return nxt, None

    if a.verb == "toggle":
        if target.kind != "receptacle" or not target.is_container:
            return _fail(w, "wrong_kind")
        if faced is None or faced.id != target.id:
            return _fail(w, "not_near")
        nxt = w.with_objects([replace(target, open=not target.open)], step=w.step + 1)
        return nxt, None

    raise ValueError(f"unknown action verb {a.verb!r}")


def step_discrete(w: WorldState, a: Action, task: TaskSpec) -> StepResult:
    """Execute one atomic action with reward accounting and termination.

    Subgoal rewards are latched: each predicate pays out the first time it
    becomes satisfied and never again, so put/take cycles cannot farm
    reward. The completion bonus pays once, on the step where the whole
    goal first holds. Success requires the goal to hold *now*; timeout
    fires when the step counter reaches ``task.max_steps``.
    """
    nxt, reason = apply_action(w, a)
    events: tuple[str, ...] = ()
    reward = 0.0
    inst: int | None = None
    success = False
    if reason is None and a.verb in ("take", "put_into", "use"):
        inst = goal_bitmap(nxt, task)
        latched = w.goal_latched | inst
        newly = latched & ~w.goal_latched
        if newly:
            events += tuple(f"goal:{i}" for i in range(len(task.predicates))
                            if newly & (1 << i))
            reward += bin(newly).count("1") * task.subgoal_reward
        bonus_paid = w.goal_bonus_paid
        if inst == task.full_mask() and not bonus_paid:
            events += ("completed",)
            reward += task.completion_bonus
            bonus_paid = True
        nxt = replace(nxt, goal_latched=latched, goal_bonus_paid=bonus_paid)
        success = inst == task.full_mask()
    done = False
    done_reason = None
    if success:
        done, done_reason = True, "success"
    elif nxt.step >= task.max_steps:
        done, done_reason = True, "timeout"
    return StepResult(next_state=nxt, reward=reward, events=events,
                      failed=reason is not None, failure_reason=reason,
                      done=done, done_reason=done_reason, goal_bitmap=inst)


def legal_actions(w: WorldState) -> list[Action]:
    """Exactly the actions whose step would not fail, canonically ordered."""
    out: list[Action] = []
    held = w.held_id()
    faced = w.faced_station()

    if faced is not None and faced.kind == "receptacle":
        if _receptacle_open(faced):
            if held is None:
                out.extend(Action("take", o.id) for o in w.contents(faced.id)
                           if o.kind == "ingredient")
            elif len(w.contents(faced.id)) < faced.capacity:
                out.append(Action("put_into", faced.id))
        if faced.is_container:
            out.append(Action("toggle", faced.id))
    if faced is not None and faced.kind == "tool":
        if faced.cls == catalog.SPAWNS_SAUCE:
            if _sauce_target(w, faced) is not None:
                out.append(Action("use", faced.id))
        elif _use_resolution(w, faced) is not None:
            out.append(Action("use", faced.id))

    for sid in sorted(w.scene.station_cells):
        if w.scene.nav_destination(sid, w.agent.cell) is not None:
            out.append(Action("navigate", sid))

    out.append(TURN)
    out.sort(key=Action.sort_key)
    return out
