"""Observation payloads: nearby-object lists and the semantic raster.

The raster is a top-down, agent-centred semantic map standing in for the
original segmentation channel: a 21x21 cell window around the agent, each
cell drawn as a 4x4 pixel block (84x84 total) carrying a (class id,
instance id) pair. Out-of-window and empty cells are 0; the agent itself
is not drawn (it is always the window centre). The map translates with
the agent and does not rotate with facing.
"""

from __future__ import annotations

from . import catalog
from .tasks import TaskSpec
from .world import WorldState

VISIBILITY_RADIUS = 5  # Chebyshev distance for nearby-object lists
RASTER_CELLS = 21
RASTER_BLOCK = 4
RASTER_SIZE = RASTER_CELLS * RASTER_BLOCK  # 84


def nearby_objects(w: WorldState) -> list[dict]:
    """Objects within the visibility radius, as plain-data records.

    Stations within Chebyshev distance 5 of the agent are listed; open
    receptacles also list their contents (closed containers hide theirs).
    The held ingredient appears at relative cell [0, 0].
    """
    ax, ay = w.agent.cell
    out: list[dict] = []
    for sid in sorted(w.scene.station_cells):
        sx, sy = w.scene.station_cells[sid]
        if max(abs(sx - ax), abs(sy - ay)) > VISIBILITY_RADIUS:
            continue
        obj = w.obj(sid)
        rec = {"id": obj.id, "kind": obj.kind, "cls": obj.cls,
               "cell": [sx - ax, sy - ay]}
        if obj.kind == "receptacle":
            rec["open"] = obj.open
            rec["capacity"] = obj.capacity
            if obj.open is False:
                rec["contents"] = None  # hidden while closed
            else:
                rec["contents"] = [o.id for o in w.contents(sid)]
                for ing in w.contents(sid):
                    out.append(_ingredient_record(ing, [sx - ax, sy - ay]))
        out.append(rec)
    held = w.held_id()
    if held is not None:
        out.append(_ingredient_record(w.obj(held), [0, 0], held=True))
    out.sort(key=lambda r: r["id"])
    return out


def _ingredient_record(obj, cell, held: bool = False) -> dict:
    return {
        "id": obj.id, "kind": "ingredient", "cls": obj.cls, "set": obj.set_name,
        "states": {name: obj.has_state(name) for name in catalog.STATE_NAMES},
        "cell": cell,
        "in": None if held else obj.loc[1],
        "held": held,
    }


def render_raster(w: WorldState) -> dict:
    """84x84 (class id, instance id) planes, row-major [y][x]."""
    size = RASTER_SIZE
    class_ids = [[0] * size for _ in range(size)]
    instance_ids = [[0] * size for _ in range(size)]
    ax, ay = w.agent.cell
    half = RASTER_CELLS // 2
    for sid, (sx, sy) in w.scene.station_cells.items():
        bx = sx - ax + half
        by = sy - ay + half
        if not (0 <= bx < RASTER_CELLS and 0 <= by < RASTER_CELLS):
            continue
        obj = w.obj(sid)
        cid = catalog.RASTER_CLASS_IDS[obj.cls]
        for py in range(by * RASTER_BLOCK, (by + 1) * RASTER_BLOCK):
            row_c = class_ids[py]
            row_i = instance_ids[py]
            for px in range(bx * RASTER_BLOCK, (bx + 1) * RASTER_BLOCK):
                row_c[px] = cid
                row_i[px] = sid
    return {"size": size, "class_ids": class_ids, "instance_ids": instance_ids}


def discrete_payload(w: WorldState, task: TaskSpec, *, scene_name: str, seed: int,
                     reward: float, done: bool, done_reason: str | None,
                     inst_bitmap: int, with_raster: bool = False) -> dict:
    n = len(task.predicates)
    payload = {
        "proto_version": 1,
        "mode": "discrete",
        "task": task.name,
        "scene": scene_name,
        "seed": seed,
        "step": w.step,
        "agent": {"cell": list(w.agent.cell), "facing": w.agent.facing},
        "held": w.held_id(),
        "nearby": nearby_objects(w),
        "goals": {
            "predicates": [p.describe() for p in task.predicates],
            "satisfied": [bool(inst_bitmap & (1 << i)) for i in range(n)],
            "latched": [bool(w.goal_latched & (1 << i)) for i in range(n)],
        },
        "reward": reward,
        "done": done,
        "done_reason": done_reason,
        "raster": render_raster(w) if with_raster else None,
        # Reserved for renderer-backed builds; never populated here.
        "rgb": None,
        "depth": None,
    }
    return payload
