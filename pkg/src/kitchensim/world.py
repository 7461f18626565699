"""Discrete kitchen world: grid scene, object instances, state snapshots.

The world state is a value. ``WorldState`` and everything it references are
frozen dataclasses, so "mutation" means building a new state that shares all
unchanged objects with its predecessor. That keeps stepping cheap (a tuple
copy plus the one or two objects that actually changed) and makes states
safe to hold across threads, hash, and replay.

Locations are encoded as small tuples:

    ("cell", x, y)   a grid cell (stations live here)
    ("held",)        in the agent's hand (at most one ingredient)
    ("in", rid)      inside / on receptacle ``rid``
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable

from . import catalog
from .errors import LayoutError

SCHEMA_VERSION = "kitchensim/1"

Loc = tuple
FACINGS = ("N", "E", "S", "W")
# Grid convention: x grows east, y grows south. "N" therefore points to y-1.
FACING_DELTA = {"N": (0, -1), "E": (1, 0), "S": (0, 1), "W": (-1, 0)}
CLOCKWISE = {"N": "E", "E": "S", "S": "W", "W": "N"}


@dataclass(frozen=True, slots=True)
class ObjectInstance:
    """One ingredient, tool, or receptacle.

    ``kind`` discriminates; unused fields stay at their neutral defaults.
    ``states`` is the ingredient flag bitmask (see catalog.STATE_BIT);
    ``open`` is None for everything that is not a container.
    """

    id: int
    kind: str  # "ingredient" | "tool" | "receptacle"
    cls: str  # tool/receptacle class name, or ingredient variant
    set_name: str = ""  # ingredient set; empty otherwise
    states: int = 0
    open: bool | None = None
    capacity: int = 0
    spawn_variant: str = ""  # sauce_bottle only
    loc: Loc = ("held",)

    def has_state(self, name: str) -> bool:
        return bool(self.states & catalog.STATE_BIT[name])

    @property
    def is_container(self) -> bool:
        return self.kind == "receptacle" and self.cls in catalog.CONTAINER_RECEPTACLES


@dataclass(frozen=True, slots=True)
class AgentPose:
    cell: tuple[int, int]
    facing: str  # one of FACINGS

    def faced_cell(self) -> tuple[int, int]:
        dx, dy = FACING_DELTA[self.facing]
        return (self.cell[0] + dx, self.cell[1] + dy)


class SceneStatic:
    """Immutable geometry shared by every state of an episode.

    Holds the grid dimensions, which cell each station occupies, and the
    precomputed navigation table: for every (station, start cell) pair the
    best adjacent destination cell and resulting facing. Not part of the
    digest beyond what ``stations`` contributes via the object list.
    """

    def __init__(self, name: str, width: int, height: int,
                 station_cells: dict[int, tuple[int, int]]):
        self.name = name
        self.width = width
        self.height = height
        self.station_cells = dict(station_cells)
        self.cell_station = {cell: sid for sid, cell in station_cells.items()}
        if len(self.cell_station) != len(station_cells):
            raise LayoutError(f"scene {name!r}: two stations share a cell")
        for sid, (x, y) in station_cells.items():
            if not (0 <= x < width and 0 <= y < height):
                raise LayoutError(
                    f"scene {name!r}: station {sid} at ({x},{y}) is outside the {width}x{height} grid")
        self._nav: dict[int, dict[tuple[int, int], tuple[tuple[int, int], str]]] = {}
        self._build_nav()

    def in_bounds(self, cell: tuple[int, int]) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def is_free(self, cell: tuple[int, int]) -> bool:
        return self.in_bounds(cell) and cell not in self.cell_station

    def free_cells(self) -> list[tuple[int, int]]:
        return [(x, y) for y in range(self.height) for x in range(self.width)
                if (x, y) not in self.cell_station]

    def neighbors(self, cell: tuple[int, int]) -> list[tuple[int, int]]:
        x, y = cell
        return [(x, y - 1), (x + 1, y), (x, y + 1), (x - 1, y)]

    def adjacent_station_ids(self, cell: tuple[int, int]) -> list[int]:
        """Station ids in the 4-neighborhood of ``cell``, ascending."""
        found = [self.cell_station[n] for n in self.neighbors(cell) if n in self.cell_station]
        return sorted(found)

    def _distance_field(self, start: tuple[int, int]) -> dict[tuple[int, int], int]:
        dist = {start: 0}
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            for nxt in self.neighbors(cur):
                if nxt not in dist and self.is_free(nxt):
                    dist[nxt] = dist[cur] + 1
                    queue.append(nxt)
        return dist

    def _build_nav(self) -> None:
        fields = {cell: self._distance_field(cell) for cell in self.free_cells()}
        for sid, scell in self.station_cells.items():
            spots = []
            for cand in self.neighbors(scell):
                if self.is_free(cand):
                    dx, dy = scell[0] - cand[0], scell[1] - cand[1]
                    facing = next(f for f, d in FACING_DELTA.items() if d == (dx, dy))
                    spots.append((cand, facing))
            table: dict[tuple[int, int], tuple[tuple[int, int], str]] = {}
            for start in self.free_cells():
                best = None
                for cand, facing in spots:
                    d = fields[start].get(cand)
                    if d is None:
                        continue
                    # Tie-break on (y, x) so the chosen spot never depends on
                    # dict ordering.
                    key = (d, cand[1], cand[0])
                    if best is None or key < best[0]:
                        best = (key, cand, facing)
                if best is not None:
                    table[start] = (best[1], best[2])
            self._nav[sid] = table

    def nav_destination(self, sid: int, start: tuple[int, int]) -> tuple[tuple[int, int], str] | None:
        """Best (cell, facing) adjacent to station ``sid`` from ``start``, or None."""
        return self._nav[sid].get(start)


@dataclass(frozen=True, slots=True)
class WorldState:
    scene: SceneStatic
    objects: tuple[ObjectInstance, ...]  # objects[i].id == i + 1
    agent: AgentPose
    step: int
    goal_latched: int  # bitmask of goal predicates already rewarded
    goal_bonus_paid: bool
    rng_state: tuple
    version: str = SCHEMA_VERSION

    def obj(self, oid: int) -> ObjectInstance:
        if not 1 <= oid <= len(self.objects):
            raise KeyError(f"no object with id {oid}")
        return self.objects[oid - 1]

    def get(self, oid: int) -> ObjectInstance | None:
        if 1 <= oid <= len(self.objects):
            return self.objects[oid - 1]
        return None

    def with_objects(self, changed: Iterable[ObjectInstance], **fields) -> "WorldState":
        """New state with some objects replaced (matched by id)."""
        by_id = {o.id: o for o in changed}
        objs = tuple(by_id.get(o.id, o) for o in self.objects)
        return replace(self, objects=objs, **fields)

    def held_id(self) -> int | None:
        for o in self.objects:
            if o.loc == ("held",):
                return o.id
        return None

    def contents(self, rid: int) -> list[ObjectInstance]:
        """Objects inside receptacle ``rid``, ascending id."""
        key = ("in", rid)
        return [o for o in self.objects if o.loc == key]

    def station_at(self, cell: tuple[int, int]) -> ObjectInstance | None:
        sid = self.scene.cell_station.get(cell)
        return self.obj(sid) if sid is not None else None

    def faced_station(self) -> ObjectInstance | None:
        return self.station_at(self.agent.faced_cell())

    def next_object_id(self) -> int:
        return len(self.objects) + 1


def affordance_check(obj: ObjectInstance, tool_cls: str) -> bool:
    """True iff using ``tool_cls`` on ``obj`` would set a new, legal flag."""
    if obj.kind != "ingredient":
        raise TypeError(f"affordance_check target must be an ingredient, got {obj.kind}")
    effect = catalog.TOOL_EFFECT[tool_cls]
    if effect == 0:
        return False  # sauce_bottle spawns; it never transforms an ingredient
    allowed = catalog.ALLOWED_STATES[obj.set_name]
    return bool(effect & allowed) and not obj.states & effect


def _loc_key(loc: Loc) -> list:
    return list(loc)


def canonical_dict(w: WorldState) -> dict:
    """Field-order-stable plain-data view of a state, digest input."""
    return {
        "version": w.version,
        "scene": w.scene.name,
        "grid": [w.scene.width, w.scene.height],
        "objects": [
            {
                "id": o.id,
                "kind": o.kind,
                "cls": o.cls,
                "set": o.set_name,
                "states": o.states,
                "open": o.open,
                "capacity": o.capacity,
                "loc": _loc_key(o.loc),
            }
            for o in w.objects
        ],
        "agent": {"cell": list(w.agent.cell), "facing": w.agent.facing},
        "step": w.step,
        "goal_latched": w.goal_latched,
        "goal_bonus_paid": w.goal_bonus_paid,
        "rng": list(w.rng_state),
    }


def state_digest(w: WorldState) -> bytes:
    """Canonical 32-byte hash; equal states produce equal digests."""
    blob = json.dumps(canonical_dict(w), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).digest()


def state_digest_hex(w: WorldState) -> str:
    return state_digest(w).hex()
