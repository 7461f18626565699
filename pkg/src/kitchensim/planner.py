"""Shortest-plan search for dish tasks.

A* over real world states, with three reductions that keep the search
tractable without giving up optimality of the returned plan length:

- *Restricted action set.* Only actions that can matter are expanded:
  navigating to goal-relevant stations, taking goal-set ingredients,
  putting into target or tool-adjacent receptacles, using tools whose
  effect appears in the goal, opening (never closing) containers. Turn is
  dominated by Navigate (any facing Navigate establishes in one action, a
  Turn needs at least one), so it is never expanded.
- *Symmetry breaking.* Ingredients of the same set with identical flags in
  the same receptacle are interchangeable for every goal predicate, so
  only the lowest-id one is ever taken.
- *Reduced state keys.* Visited-set identity ignores fields that cannot
  influence the remaining plan: step counter, reward latches, rng state,
  and ingredients that the restricted actions can never touch.

The heuristic is an admissible count of actions that must still happen:
one Use per missing state flag (or sauce squeeze), pick-up/deposit actions
per misplaced ingredient, one Toggle per closed container holding a needed
ingredient, and one Navigate per distinct station kind that must be faced.
"""

from __future__ import annotations

import heapq
from collections import deque
from itertools import combinations

from . import catalog
from .actions import Action, apply_action, step_discrete
from .errors import PlanningError
from .tasks import TaskSpec, goal_bitmap
from .world import ObjectInstance, WorldState


def _receptacle_open(recv: ObjectInstance) -> bool:
    return not recv.is_container or bool(recv.open)


class _PlanModel:
    """Static goal-relevance analysis of (initial state, task)."""

    def __init__(self, w0: WorldState, task: TaskSpec):
        self.task = task
        self.goal_mask = task.full_mask()
        self.sets = {p.set_name for p in task.predicates}
        union_flags = 0
        for p in task.predicates:
            union_flags |= p.required_states
        self.union_flags = union_flags
        self.spawn_needed = "sauce" in self.sets

        scene = w0.scene
        tool_classes = {cls for cls, eff in catalog.TOOL_EFFECT.items()
                        if eff and eff & union_flags}
        self.tool_ids: list[int] = []
        self.tool_adjacent: dict[int, list[int]] = {}
        work: set[int] = set()
        for o in w0.objects:
            if o.kind != "tool":
                continue
            relevant = o.cls in tool_classes or (self.spawn_needed
                                                 and o.cls == catalog.SPAWNS_SAUCE)
            if not relevant:
                continue
            adj = [rid for rid in scene.adjacent_station_ids(scene.station_cells[o.id])
                   if w0.obj(rid).kind == "receptacle"]
            if not adj:
                continue  # a tool nothing can sit next to can never fire
            self.tool_ids.append(o.id)
            self.tool_adjacent[o.id] = adj
            work.update(adj)

        target_classes = {p.target_cls for p in task.predicates}
        self.target_ids = [o.id for o in w0.objects
                           if o.kind == "receptacle" and o.cls in target_classes]
        self.candidate_ids = [o.id for o in w0.objects
                              if o.kind == "ingredient" and o.set_name in self.sets]
        sources = {o.loc[1] for o in w0.objects
                   if o.id in set(self.candidate_ids) and o.loc[0] == "in"}
        self.put_set = set(self.target_ids) | work
        nav = self.put_set | set(self.tool_ids) | sources
        self.nav_ids = sorted(nav)
        self.container_ids = sorted(
            rid for rid in nav
            if w0.obj(rid).kind == "receptacle" and w0.obj(rid).is_container)

        tracked = set(self.candidate_ids)
        for rid in self.put_set:
            tracked.update(o.id for o in w0.contents(rid))
        self.tracked = sorted(tracked)
        self.initial_len = len(w0.objects)

        # Work sets per state flag: receptacles where an ingredient can gain
        # that flag (adjacent to a usable tool with the effect).
        self.flag_work: dict[int, frozenset[int]] = {}
        for flag in catalog.STATE_BIT.values():
            recs: set[int] = set()
            for tid in self.tool_ids:
                if catalog.TOOL_EFFECT[w0.obj(tid).cls] == flag:
                    recs.update(self.tool_adjacent[tid])
            self.flag_work[flag] = frozenset(recs)
        self.targets_by_cls: dict[str, frozenset[int]] = {
            cls: frozenset(o.id for o in w0.objects
                           if o.kind == "receptacle" and o.cls == cls)
            for cls in target_classes}

        # Sauce bottles with a goal receptacle right next to them can land a
        # squeeze directly where it is needed.
        self.spawn_landing: dict[str, frozenset[int]] = {}
        spawn_recs: set[int] = set()
        for tid in self.tool_ids:
            if w0.obj(tid).cls == catalog.SPAWNS_SAUCE:
                spawn_recs.update(self.tool_adjacent[tid])
        self.spawn_receptacles = frozenset(spawn_recs)
        self._relevant_face = set(self.nav_ids) | set(self.tool_ids)
        self._cover_cache: dict = {}

    def key(self, w: WorldState):
        objs = w.objects
        parts = [(oid, objs[oid - 1].loc, objs[oid - 1].states) for oid in self.tracked]
        for o in objs[self.initial_len:]:
            parts.append((o.id, o.loc, o.states))
        opens = tuple(objs[rid - 1].open for rid in self.container_ids)
        return (w.agent.cell, w.agent.facing, opens, tuple(parts))

    def actions(self, w: WorldState) -> list[Action]:
        out: list[Action] = []
        held = w.held_id()
        faced = w.faced_station()
        if faced is not None:
            if faced.kind == "receptacle" and faced.id in self.nav_ids:
                if faced.is_container and not faced.open:
                    out.append(Action("toggle", faced.id))
                elif held is None:
                    groups = set()
                    for o in w.contents(faced.id):
                        if o.kind != "ingredient" or o.set_name not in self.sets:
                            continue
                        g = (o.set_name, o.states)
                        if g not in groups:
                            groups.add(g)
                            out.append(Action("take", o.id))
                elif faced.id in self.put_set and \
                        len(w.contents(faced.id)) < faced.capacity:
                    out.append(Action("put_into", faced.id))
            elif faced.kind == "tool" and faced.id in self.tool_adjacent:
                ok, _ = _use_would_work(w, faced)
                if ok:
                    out.append(Action("use", faced.id))
        for sid in self.nav_ids:
            dest = w.scene.nav_destination(sid, w.agent.cell)
            if dest is None or dest == (w.agent.cell, w.agent.facing):
                continue
            out.append(Action("navigate", sid))
        out.sort(key=Action.sort_key)
        return out

    def _cover_hops(self, missing: int, current_rid: int | None, target_cls: str) -> int:
        """Fewest placements moving an ingredient through all needed spots.

        Constraints: for each missing flag, visit a receptacle in its work
        set; finally, sit in a target-class instance. Constraints already
        satisfied by the current receptacle cost nothing; the rest need a
        minimum-size family of receptacles covering them (exact, the
        instances involved number at most a handful).
        """
        key = (missing, current_rid, target_cls)
        cached = self._cover_cache.get(key)
        if cached is not None:
            return cached
        constraints: list[frozenset[int]] = []
        for flag, work in self.flag_work.items():
            if missing & flag and (current_rid is None or current_rid not in work):
                constraints.append(work)
        targets = self.targets_by_cls[target_cls]
        if current_rid is None or current_rid not in targets:
            constraints.append(targets)
        if not constraints:
            self._cover_cache[key] = 0
            return 0
        if any(not c for c in constraints):
            self._cover_cache[key] = 10 ** 6  # some flag has no usable tool
            return 10 ** 6
        universe = sorted(set().union(*constraints))
        hops = len(constraints)
        # Exact minimum cover; tiny universe, tiny constraint count.
        for size in range(1, len(constraints)):
            done = False
            for combo in combinations(universe, size):
                chosen = set(combo)
                if all(chosen & c for c in constraints):
                    hops, done = size, True
                    break
            if done:
                break
        self._cover_cache[key] = hops
        return hops

    def heuristic(self, w: WorldState, bitmap: int) -> int:
        """Admissible remaining-action count.

        Sums, over a cheapest injective witness choice per ingredient set:
        one Use per missing flag, a take+put pair per required hop; plus
        one Toggle per closed container holding a chosen witness, and a
        lower bound on Navigates from transport facing-events and the
        distinct tool kinds that must fire.
        """
        task = self.task
        if bitmap == self.goal_mask:
            return 0
        total = 0
        events = 0
        cross_allowance = 0
        toggles: set[int] = set()
        tool_blocks: set[int] = set()

        by_set: dict[str, tuple[int, int]] = {}  # set -> (unsat count, sat count)
        req_by_set: dict[str, int] = {}
        for i, p in enumerate(task.predicates):
            unsat, sat = by_set.get(p.set_name, (0, 0))
            if bitmap & (1 << i):
                by_set[p.set_name] = (unsat, sat + 1)
            else:
                by_set[p.set_name] = (unsat + 1, sat)
                req_by_set[p.set_name] = p.required_states

        for set_name, (unsat, sat) in by_set.items():
            if not unsat:
                continue
            required = req_by_set[set_name]
            # cost entries: (actions, facing events, toggles, tool blocks)
            costs: list[tuple[int, int, frozenset, frozenset]] = []
            have_flags = 0
            for o in w.objects:
                if o.kind != "ingredient" or o.set_name != set_name:
                    continue
                have_flags |= o.states
                missing = required & ~o.states
                n_missing = bin(missing).count("1")
                if o.loc == ("held",):
                    hops = self._cover_hops(missing, None, self._target_for(set_name))
                    costs.append((n_missing + 2 * hops - 1, hops, frozenset(),
                                  frozenset()))
                else:
                    rid = o.loc[1]
                    hops = self._cover_hops(missing, rid, self._target_for(set_name))
                    ev = hops + (1 if hops else 0)
                    recv = w.obj(rid)
                    togg = frozenset([rid]) if hops and recv.is_container \
                        and not recv.open else frozenset()
                    if hops and rid in self.put_set:
                        cross_allowance += 1
                    costs.append((n_missing + 2 * hops, ev, togg, frozenset()))
            if set_name == "sauce" and self.spawn_receptacles:
                # Virtual candidate: one squeeze creates a fresh sauce where
                # a bottle can reach; it may still need flags and moving.
                best = None
                for rid in self.spawn_receptacles:
                    hops = self._cover_hops(required, rid, self._target_for(set_name))
                    if best is None or hops < best:
                        best = hops
                if best is not None:
                    n_missing = bin(required).count("1")
                    costs.append((1 + n_missing + 2 * best, best + (1 if best else 0),
                                  frozenset(), frozenset([0])))
            costs.sort(key=lambda c: c[0])
            if len(costs) < unsat + sat:
                return 10 ** 6  # not enough distinct witnesses: dead end
            # Satisfied predicates consume one zero-cost witness each.
            chosen = costs[sat:sat + unsat]
            for cost, ev, togg, blocks in chosen:
                total += cost
                events += ev
                toggles.update(togg)
                tool_blocks.update(blocks)
            for flag in catalog.STATE_BIT.values():
                if required & flag and not have_flags & flag:
                    tool_blocks.add(flag)

        total += len(toggles)
        faced = w.faced_station()
        discount = 1 if faced is not None and faced.id in self._relevant_face else 0
        total += max(0, events - cross_allowance + len(tool_blocks) - discount)
        return total

    def _target_for(self, set_name: str) -> str:
        return next(p.target_cls for p in self.task.predicates
                    if p.set_name == set_name)


def _use_would_work(w: WorldState, tool: ObjectInstance) -> tuple[bool, str | None]:
    nxt, reason = apply_action(w, Action("use", tool.id))
    return reason is None, reason


def _unsatisfiable_message(task: TaskSpec, ever_mask: int) -> str:
    for i, p in enumerate(task.predicates):
        if not ever_mask & (1 << i):
            return f"predicate {i} ({p.describe()}) was never satisfied"
    return "goal not reached"


def optimal_plan(w: WorldState, task: TaskSpec,
                 max_expansions: int = 2_000_000) -> list[Action]:
    """Shortest atomic-action sequence from ``w`` to the task goal.

    Deterministic: ties are broken by expansion order, and successors are
    generated in canonical action-encoding order. Raises PlanningError if
    the goal is unreachable, naming the first unsatisfiable predicate.
    """
    model = _PlanModel(w, task)
    start_bitmap = goal_bitmap(w, task)
    if start_bitmap == model.goal_mask:
        return []

    start_key = model.key(w)
    best_g: dict = {start_key: 0}
    counter = 0
    h0 = model.heuristic(w, start_bitmap)
    # Ties prefer deeper nodes (-g); the counter keeps ordering total and
    # deterministic without ever comparing states.
    frontier: list = [(h0, 0, counter, w, [], start_bitmap)]
    ever_mask = start_bitmap
    expansions = 0

    while frontier:
        f, neg_g, _, state, path, bitmap = heapq.heappop(frontier)
        g = -neg_g
        key = model.key(state)
        if best_g.get(key, g) < g:
            continue
        if bitmap == model.goal_mask:
            _validate_plan(w, task, path)
            return path
        expansions += 1
        if expansions > max_expansions:
            raise PlanningError(
                f"search budget exhausted after {max_expansions} expansions; "
                + _unsatisfiable_message(task, ever_mask))
        for action in model.actions(state):
            nxt, reason = apply_action(state, action)
            if reason is not None:
                continue
            nkey = model.key(nxt)
            ng = g + 1
            if best_g.get(nkey, ng + 1) <= ng:
                continue
            best_g[nkey] = ng
            nbitmap = goal_bitmap(nxt, task)
            ever_mask |= nbitmap
            counter += 1
            h = 0 if nbitmap == model.goal_mask else model.heuristic(nxt, nbitmap)
            heapq.heappush(frontier,
                           (ng + h, -ng, counter, nxt, path + [action], nbitmap))

    raise PlanningError("goal unreachable: " + _unsatisfiable_message(task, ever_mask))


def plan_bfs_reference(w: WorldState, task: TaskSpec,
                       max_nodes: int = 3_000_000) -> list[Action]:
    """Uninformed BFS over the same restricted graph; test oracle for A*."""
    model = _PlanModel(w, task)
    if goal_bitmap(w, task) == model.goal_mask:
        return []
    seen = {model.key(w)}
    queue = deque([(w, [])])
    nodes = 0
    while queue:
        state, path = queue.popleft()
        nodes += 1
        if nodes > max_nodes:
            raise PlanningError("BFS budget exhausted")
        for action in model.actions(state):
            nxt, reason = apply_action(state, action)
            if reason is not None:
                continue
            nkey = model.key(nxt)
            if nkey in seen:
                continue
            seen.add(nkey)
            npath = path + [action]
            if goal_bitmap(nxt, task) == model.goal_mask:
                return npath
            queue.append((nxt, npath))
    raise PlanningError("goal unreachable (BFS)")


def _validate_plan(w: WorldState, task: TaskSpec, plan: list[Action]) -> None:
    """Execute the plan through the real engine; any failure is a bug."""
    state = w
    for i, action in enumerate(plan):
        result = step_discrete(state, action, task)
        if result.failed:
            raise PlanningError(
                f"planned action {i} ({action.encode()}) failed: {result.failure_reason}")
        state = result.next_state
    if goal_bitmap(state, task) != task.full_mask():
        raise PlanningError("plan execution did not reach the goal")
