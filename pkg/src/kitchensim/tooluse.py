"""Continuous hand-control tool-use tasks.

Five tasks (cutting, peeling, can_opening, pouring, getting_water) driven
by a 7-tuple hand action: translation deltas, intrinsic Z-Y-X Euler
rotation deltas, and a grab strength. Grab strength strictly above 0.1
attaches the nearest grabbable prop within 0.12 m to the hand; at or below
0.1 the hand releases and the prop falls straight down onto whatever
supports it. Attached props follow the hand rigidly.

Episodes last at most 50 steps. Rewards are events: +1 for the first grab
of the task's tool, +1 per task event (plane cut, patch peeled, lid side
broken, per-step water transfer). All arithmetic is plain IEEE doubles
with no randomness, so identical action sequences reproduce states
bitwise.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace

from .errors import ConfigError, EpisodeOver
from .textconf import parse_config, parse_int

MAX_STEPS_CONTINUOUS = 50
GRAB_THRESHOLD = 0.1  # strictly-greater grabs
GRAB_REACH = 0.12
TRANSLATION_CLAMP = 0.05  # metres per axis per step
ROTATION_CLAMP = 0.2  # radians per axis per step
TRANSFER_RATE = 0.05  # fill fraction per step while pouring/filling
FILL_DONE = 0.5  # strictly-greater finishes
PEEL_PATCHES = 8
PEEL_NEEDED = 6
PEEL_PITCH_LIMIT = math.pi / 6  # blade within 30 degrees of the surface tangent
# Half the patch pitch, so one tip position can never touch two patches.
CONTACT_EPS_PEEL = 0.01
CONTACT_EPS_CAN = 0.015
TAKE_REWARD = 1.0
EVENT_REWARD = 1.0

TOOLUSE_TASKS = ("cutting", "peeling", "can_opening", "pouring", "getting_water")

# Which grabbable prop pays the take reward, per task.
TASK_TOOL = {
    "cutting": "knife",
    "peeling": "peeler",
    "can_opening": "opener",
    "pouring": "cup_source",
    "getting_water": "cup",
}

Vec = tuple[float, float, float]
Mat = tuple[float, ...]  # row-major 3x3

_IDENTITY: Mat = (1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)


def _rot_zyx(phi: float, theta: float, psi: float) -> Mat:
    """Intrinsic Z-Y-X rotation matrix: yaw about Z, pitch about Y, roll about X."""
    cz, sz = math.cos(phi), math.sin(phi)
    cy, sy = math.cos(theta), math.sin(theta)
    cx, sx = math.cos(psi), math.sin(psi)
    return (
        cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx,
        sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx,
        -sy, cy * sx, cy * cx,
    )


def _mat_vec(m: Mat, v: Vec) -> Vec:
    return (m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
            m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
            m[6] * v[0] + m[7] * v[1] + m[8] * v[2])


def _mat_t_vec(m: Mat, v: Vec) -> Vec:
    return (m[0] * v[0] + m[3] * v[1] + m[6] * v[2],
            m[1] * v[0] + m[4] * v[1] + m[7] * v[2],
            m[2] * v[0] + m[5] * v[1] + m[8] * v[2])


def _mat_mul(a: Mat, b: Mat) -> Mat:
    return tuple(sum(a[3 * i + k] * b[3 * k + j] for k in range(3))
                 for i in range(3) for j in range(3))


def _mat_t(m: Mat) -> Mat:
    return (m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8])


def _add(a: Vec, b: Vec) -> Vec:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _sub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _dist(a: Vec, b: Vec) -> float:
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


def _norm_angle(a: float) -> float:
    """Normalize to (-pi, pi]."""
    r = math.fmod(a + math.pi, 2.0 * math.pi)
    if r <= 0.0:
        r += 2.0 * math.pi
    return r - math.pi


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def _segment_distance(p1: Vec, q1: Vec, p2: Vec, q2: Vec) -> float:
    """Minimum distance between segments p1q1 and p2q2."""
    d1 = _sub(q1, p1)
    d2 = _sub(q2, p2)
    r = _sub(p1, p2)
    a = sum(x * x for x in d1)
    e = sum(x * x for x in d2)
    f = sum(x * y for x, y in zip(d2, r))
    if a <= 1e-12 and e <= 1e-12:
        return _dist(p1, p2)
    if a <= 1e-12:
        s, t = 0.0, _clamp(f / e, 0.0, 1.0)
    else:
        c = sum(x * y for x, y in zip(d1, r))
        if e <= 1e-12:
            t, s = 0.0, _clamp(-c / a, 0.0, 1.0)
        else:
            b = sum(x * y for x, y in zip(d1, d2))
            denom = a * e - b * b
            s = _clamp((b * f - c * e) / denom, 0.0, 1.0) if denom > 1e-12 else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = _clamp(-c / a, 0.0, 1.0)
            elif t > 1.0:
                t = 1.0
                s = _clamp((b - c) / a, 0.0, 1.0)
    c1 = _add(p1, tuple(x * s for x in d1))
    c2 = _add(p2, tuple(x * t for x in d2))
    return _dist(c1, c2)


@dataclass(frozen=True, slots=True)
class HandAction:
    dx: float = 0.0
    dy: float = 0.0
    dz: float = 0.0
    dphi: float = 0.0
    dtheta: float = 0.0
    dpsi: float = 0.0
    gamma: float = 0.0

    def encode(self) -> dict:
        return {"type": "hand", "dx": self.dx, "dy": self.dy, "dz": self.dz,
                "dphi": self.dphi, "dtheta": self.dtheta, "dpsi": self.dpsi,
                "gamma": self.gamma}


def decode_hand_action(data: dict) -> HandAction:
    if not isinstance(data, dict) or data.get("type") != "hand":
        raise ValueError("continuous action must be an object with type 'hand'")
    vals = {}
    for key in ("dx", "dy", "dz", "dphi", "dtheta", "dpsi", "gamma"):
        v = data.get(key, 0.0)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValueError(f"hand action field {key!r} must be a number")
        vals[key] = float(v)
    return HandAction(**vals)


@dataclass(frozen=True, slots=True)
class HandState:
    position: Vec
    orientation: tuple[float, float, float]  # (phi, theta, psi), each in (-pi, pi]
    grabbed: int | None = None
    # Grabbed prop pose relative to the hand frame, captured at grab time.
    attach_pos: Vec | None = None
    attach_rot: Mat | None = None

    def rotation(self) -> Mat:
        return _rot_zyx(*self.orientation)


@dataclass(frozen=True, slots=True)
class Prop:
    id: int
    name: str
    center: Vec
    half: Vec
    grabbable: bool = False
    fill: float | None = None
    rot: Mat = _IDENTITY

    def top_z(self) -> float:
        return self.center[2] + self.half[2]

    def bottom_z(self) -> float:
        return self.center[2] - self.half[2]

    def footprint_contains(self, x: float, y: float) -> bool:
        return (abs(x - self.center[0]) <= self.half[0]
                and abs(y - self.center[1]) <= self.half[1])


@dataclass(frozen=True, slots=True)
class ContinuousScene:
    task: str
    props: tuple[Prop, ...]
    step: int = 0
    took_tool: bool = False
    # Monotone per-task event flags: cut planes (3), peel patches (8),
    # lid sides (4); empty for the two water tasks (they track fill).
    flags: tuple[bool, ...] = ()
    done: bool = False

    def prop_named(self, name: str) -> Prop:
        for p in self.props:
            if p.name == name:
                return p
        raise KeyError(f"no prop named {name!r}")

    def prop(self, pid: int) -> Prop:
        for p in self.props:
            if p.id == pid:
                return p
        raise KeyError(f"no prop with id {pid}")


# Cut planes sit at these offsets from the carrot centre, splitting it into
# four pieces. Blade geometry: a segment along the prop's local X axis at
# its bottom face.
CUT_PLANE_OFFSETS = (-0.04, 0.0, 0.04)


def _blade_segment(prop: Prop) -> tuple[Vec, Vec]:
    lo = _mat_vec(prop.rot, (-prop.half[0], 0.0, -prop.half[2]))
    hi = _mat_vec(prop.rot, (prop.half[0], 0.0, -prop.half[2]))
    return _add(prop.center, lo), _add(prop.center, hi)


def _peel_patches(kiwi: Prop) -> list[Vec]:
    xs = (-0.036, -0.012, 0.012, 0.036)
    ys = (-0.0175, 0.0175)
    z = kiwi.top_z()
    return [(kiwi.center[0] + dx, kiwi.center[1] + dy, z) for dy in ys for dx in xs]


def _lid_sides(can: Prop) -> list[tuple[Vec, Vec]]:
    cx, cy = can.center[0], can.center[1]
    hx, hy = can.half[0], can.half[1]
    z = can.top_z()
    return [
        ((cx - hx, cy - hy, z), (cx + hx, cy - hy, z)),  # south
        ((cx + hx, cy - hy, z), (cx + hx, cy + hy, z)),  # east
        ((cx - hx, cy + hy, z), (cx + hx, cy + hy, z)),  # north
        ((cx - hx, cy - hy, z), (cx - hx, cy + hy, z)),  # west
    ]


def _opening_point(cup: Prop) -> Vec:
    return _add(cup.center, _mat_vec(cup.rot, (0.0, 0.0, cup.half[2])))


def _up_dot(prop: Prop) -> float:
    """Z component of the prop's local up axis; negative means upside down."""
    return prop.rot[8]


def _initial_flags(task: str) -> tuple[bool, ...]:
    if task == "cutting":
        return (False,) * len(CUT_PLANE_OFFSETS)
    if task == "peeling":
        return (False,) * PEEL_PATCHES
    if task == "can_opening":
        return (False,) * 4
    return ()


def _advance_fill(fill: float, amount: float) -> float:
    """Add one transfer, keeping full-rate transfers on the n*rate grid.

    Grid-snapping avoids drift from repeated addition (ten 0.05-steps sum
    to just under 0.5; ten on the grid land just over, finishing the task
    at the tenth transfer). Partial final dribbles stay plain additions so
    a nearly-empty source is never overdrawn.
    """
    if amount == TRANSFER_RATE:
        return TRANSFER_RATE * round((fill + amount) / TRANSFER_RATE)
    return fill + amount


def _support_drop(scene: ContinuousScene, prop: Prop) -> Prop:
    """Let a released prop fall straight down onto the highest support below."""
    best = 0.0  # the floor
    for other in scene.props:
        if other.id == prop.id:
            continue
        if other.footprint_contains(prop.center[0], prop.center[1]) \
                and other.top_z() <= prop.bottom_z() + 1e-9:
            best = max(best, other.top_z())
    new_z = best + prop.half[2]
    return replace(prop, center=(prop.center[0], prop.center[1], new_z))


def step_continuous(scene: ContinuousScene, hand: HandState, action: HandAction,
                    ) -> tuple[ContinuousScene, HandState, float, bool]:
    """Advance the scene one tick; returns (scene, hand, reward, done)."""
    if scene.step >= MAX_STEPS_CONTINUOUS or scene.done:
        raise EpisodeOver(f"episode over at step {scene.step}")
    for name in ("dx", "dy", "dz", "dphi", "dtheta", "dpsi", "gamma"):
        v = getattr(action, name)
        if math.isnan(v) or math.isinf(v):
            raise ValueError(f"hand action field {name!r} is not finite")

    pos = (hand.position[0] + _clamp(action.dx, -TRANSLATION_CLAMP, TRANSLATION_CLAMP),
           hand.position[1] + _clamp(action.dy, -TRANSLATION_CLAMP, TRANSLATION_CLAMP),
           hand.position[2] + _clamp(action.dz, -TRANSLATION_CLAMP, TRANSLATION_CLAMP))
    ori = (_norm_angle(hand.orientation[0] + _clamp(action.dphi, -ROTATION_CLAMP, ROTATION_CLAMP)),
           _norm_angle(hand.orientation[1] + _clamp(action.dtheta, -ROTATION_CLAMP, ROTATION_CLAMP)),
           _norm_angle(hand.orientation[2] + _clamp(action.dpsi, -ROTATION_CLAMP, ROTATION_CLAMP)))
    rot = _rot_zyx(*ori)

    reward = 0.0
    props = list(scene.props)
    took_tool = scene.took_tool
    grabbed = hand.grabbed
    attach_pos = hand.attach_pos
    attach_rot = hand.attach_rot

    if action.gamma > GRAB_THRESHOLD:
        if grabbed is None:
            nearest = None
            for p in props:
                if not p.grabbable:
                    continue
                d = _dist(pos, p.center)
                if d <= GRAB_REACH and (nearest is None or d < nearest[0]):
                    nearest = (d, p)
            if nearest is not None:
                p = nearest[1]
                grabbed = p.id
                attach_pos = _mat_t_vec(rot, _sub(p.center, pos))
                attach_rot = _mat_mul(_mat_t(rot), p.rot)
                if not took_tool and p.name == TASK_TOOL[scene.task]:
                    took_tool = True
                    reward += TAKE_REWARD
    else:
        if grabbed is not None:
            idx = next(i for i, p in enumerate(props) if p.id == grabbed)
            props[idx] = _support_drop(scene, props[idx])
            grabbed = None
            attach_pos = None
            attach_rot = None

    if grabbed is not None:
        idx = next(i for i, p in enumerate(props) if p.id == grabbed)
        props[idx] = replace(props[idx],
                             center=_add(pos, _mat_vec(rot, attach_pos)),
                             rot=_mat_mul(rot, attach_rot))

    tmp = replace(scene, props=tuple(props))
    flags = list(scene.flags)
    goal_met = False

    if scene.task == "cutting":
        knife = tmp.prop_named("knife")
        carrot = tmp.prop_named("carrot")
        b1, b2 = _blade_segment(knife)
        for i, off in enumerate(CUT_PLANE_OFFSETS):
            if flags[i]:
                continue
            px = carrot.center[0] + off
            s1, s2 = b1[0] - px, b2[0] - px
            if s1 * s2 < 0.0:
                t = s1 / (s1 - s2)
                hit = (px, b1[1] + t * (b2[1] - b1[1]), b1[2] + t * (b2[2] - b1[2]))
                if (abs(hit[1] - carrot.center[1]) <= carrot.half[1]
                        and abs(hit[2] - carrot.center[2]) <= carrot.half[2]):
                    flags[i] = True
                    reward += EVENT_REWARD
        goal_met = all(flags)

    elif scene.task == "peeling":
        peeler = tmp.prop_named("peeler")
        kiwi = tmp.prop_named("kiwi")
        tip = _add(peeler.center, _mat_vec(peeler.rot, (peeler.half[0], 0.0, 0.0)))
        axis = _mat_vec(peeler.rot, (1.0, 0.0, 0.0))
        elevation = abs(math.asin(_clamp(axis[2], -1.0, 1.0)))
        if elevation <= PEEL_PITCH_LIMIT:
            for i, patch in enumerate(_peel_patches(kiwi)):
                if not flags[i] and _dist(tip, patch) <= CONTACT_EPS_PEEL:
                    flags[i] = True
                    reward += EVENT_REWARD
        goal_met = sum(flags) >= PEEL_NEEDED

    elif scene.task == "can_opening":
        opener = tmp.prop_named("opener")
        can = tmp.prop_named("can")
        b1, b2 = _blade_segment(opener)
        for i, (s1, s2) in enumerate(_lid_sides(can)):
            if not flags[i] and _segment_distance(b1, b2, s1, s2) <= CONTACT_EPS_CAN:
                flags[i] = True
                reward += EVENT_REWARD
        goal_met = all(flags)

    elif scene.task == "pouring":
        src_i = next(i for i, p in enumerate(props) if p.name == "cup_source")
        tgt_i = next(i for i, p in enumerate(props) if p.name == "cup_target")
        src, tgt = props[src_i], props[tgt_i]
        opening = _opening_point(src)
        tilted = _up_dot(src) < 0.0  # more than 90 degrees from vertical
        if tilted and tgt.footprint_contains(opening[0], opening[1]) \
                and opening[2] > tgt.top_z() and src.fill > 0.0:
            new_tgt = _advance_fill(tgt.fill, min(TRANSFER_RATE, src.fill))
            moved = new_tgt - tgt.fill  # one value both sides: exact conservation
            props[src_i] = replace(src, fill=src.fill - moved)
            props[tgt_i] = replace(tgt, fill=new_tgt)
            reward += EVENT_REWARD
        goal_met = props[tgt_i].fill > FILL_DONE

    elif scene.task == "getting_water":
        cup_i = next(i for i, p in enumerate(props) if p.name == "cup")
        tap = tmp.prop_named("tap")
        cup = props[cup_i]
        opening = _opening_point(cup)
        in_column = (math.hypot(opening[0] - tap.center[0], opening[1] - tap.center[1])
                     <= tap.half[0]
                     and opening[2] < tap.top_z()
                     and _up_dot(cup) > 0.0)
        if in_column and cup.fill < 1.0:
            props[cup_i] = replace(cup, fill=min(1.0, _advance_fill(cup.fill, TRANSFER_RATE)))
            reward += EVENT_REWARD
        goal_met = props[cup_i].fill > FILL_DONE

    else:
        raise ValueError(f"unknown tooluse task {scene.task!r}")

    step = scene.step + 1
    done = goal_met or step >= MAX_STEPS_CONTINUOUS
    new_scene = replace(scene, props=tuple(props), step=step,
                        took_tool=took_tool, flags=tuple(flags), done=done)
    new_hand = HandState(position=pos, orientation=ori, grabbed=grabbed,
                         attach_pos=attach_pos, attach_rot=attach_rot)
    return new_scene, new_hand, reward, done


def observe_continuous(scene: ContinuousScene, hand: HandState) -> tuple[float, ...]:
    """Fixed-length symbolic observation.

    Layout: hand position (3), hand Euler angles (3), grab flag (1), then
    per prop in id order its position relative to the hand (3 each), then
    the task progress slots: event counter for cutting/peeling/can_opening,
    (source, target) fill for pouring, cup fill for getting_water.
    """
    out = [*hand.position, *hand.orientation, 1.0 if hand.grabbed is not None else 0.0]
    for p in scene.props:
        out.extend(_sub(p.center, hand.position))
    if scene.task == "pouring":
        out.append(scene.prop_named("cup_source").fill)
        out.append(scene.prop_named("cup_target").fill)
    elif scene.task == "getting_water":
        out.append(scene.prop_named("cup").fill)
    else:
        out.append(float(sum(scene.flags)))
    return tuple(out)


def continuous_digest(scene: ContinuousScene, hand: HandState) -> bytes:
    """Canonical hash of the continuous state; floats hashed bit-exactly."""

    def fx(v: float) -> str:
        return v.hex()

    blob = {
        "task": scene.task,
        "step": scene.step,
        "took_tool": scene.took_tool,
        "flags": [int(f) for f in scene.flags],
        "done": scene.done,
        "props": [
            {"id": p.id, "name": p.name, "center": [fx(c) for c in p.center],
             "rot": [fx(r) for r in p.rot],
             "fill": None if p.fill is None else fx(p.fill)}
            for p in scene.props
        ],
        "hand": {"pos": [fx(c) for c in hand.position],
                 "ori": [fx(c) for c in hand.orientation],
                 "grabbed": hand.grabbed},
    }
    data = json.dumps(blob, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(data.encode("utf-8")).digest()


def load_tooluse_text(text: str, source: str = "<tooluse>",
                      ) -> tuple[ContinuousScene, HandState]:
    """Parse a tool-use layout document.

    Format::

        version = 1
        name = tool_cutting

        [tooluse]
        task = cutting

        [props]
        table = 0,0,0.4 half 0.6,0.5,0.4
        knife = 0.3,0,0.83 half 0.1,0.01,0.02 grabbable
        carrot = 0,0,0.82 half 0.08,0.02,0.02
        cup_source = 0.25,0,0.85 half 0.03,0.03,0.05 grabbable fill=1.0
    """
    doc = parse_config(text, source)
    version = parse_int(doc, doc.require_top("version"))
    if version != 1:
        raise doc.error("unsupported config version", doc.top["version"].line)
    section = doc.section_map("tooluse")
    if "task" not in section:
        raise doc.error("[tooluse] must define task", doc.section_lines.get("tooluse"))
    task = section["task"].value
    if task not in TOOLUSE_TASKS:
        raise doc.error(f"unknown tooluse task {task!r}", section["task"].line)

    props: list[Prop] = []
    for entry in doc.require_section("props"):
        tokens = entry.value.split()
        if len(tokens) < 3 or tokens[1] != "half":
            raise doc.error(f"expected 'x,y,z half hx,hy,hz [opts]', got {entry.value!r}",
                            entry.line)

        def vec3(text3: str) -> Vec:
            parts = text3.split(",")
            if len(parts) != 3:
                raise doc.error(f"expected three comma-separated numbers, got {text3!r}",
                                entry.line)
            try:
                return tuple(float(p) for p in parts)
            except ValueError:
                raise doc.error(f"bad number in {text3!r}", entry.line)

        center = vec3(tokens[0])
        half = vec3(tokens[2])
        grabbable = False
        fill = None
        for tok in tokens[3:]:
            if tok == "grabbable":
                grabbable = True
            elif tok.startswith("fill="):
                try:
                    fill = float(tok[5:])
                except ValueError:
                    raise doc.error(f"bad fill value {tok!r}", entry.line)
            else:
                raise doc.error(f"unknown prop option {tok!r}", entry.line)
        props.append(Prop(id=len(props) + 1, name=entry.key, center=center,
                          half=half, grabbable=grabbable, fill=fill))

    needed = {
        "cutting": ("knife", "carrot"),
        "peeling": ("peeler", "kiwi"),
        "can_opening": ("opener", "can"),
        "pouring": ("cup_source", "cup_target"),
        "getting_water": ("cup", "tap"),
    }[task]
    names = {p.name for p in props}
    for req in needed:
        if req not in names:
            raise doc.error(f"task {task!r} requires a prop named {req!r}",
                            doc.section_lines.get("props"))

    scene = ContinuousScene(task=task, props=tuple(props),
                            flags=_initial_flags(task))
    hand = HandState(position=(0.0, 0.0, 1.0), orientation=(0.0, 0.0, 0.0))
    return scene, hand


def bundled_tooluse_text(task: str) -> str:
    from importlib import resources
    if task not in TOOLUSE_TASKS:
        raise ConfigError(f"unknown tooluse task {task!r}; have {', '.join(TOOLUSE_TASKS)}")
    return resources.files("kitchensim.scenes").joinpath(f"tool_{task}.scene").read_text()


def load_bundled_tooluse(task: str) -> tuple[ContinuousScene, HandState]:
    return load_tooluse_text(bundled_tooluse_text(task), source=f"tool_{task}")


# --- scripted reference controllers -------------------------------------
#
# Closed-loop policies: each maps (scene, hand) to the next action using
# only the visible state, so they are pure and replay-deterministic. They
# complete their task well inside the 50-step horizon and collect exactly
# take-reward + the full event sum.

HOLD = 0.5  # grab strength while carrying


def _move_toward(cur: Vec, tgt: Vec, clamp: float = TRANSLATION_CLAMP) -> Vec:
    return tuple(_clamp(t - c, -clamp, clamp) for c, t in zip(cur, tgt))


def _approach_and_grab(hand: HandState, prop: Prop) -> HandAction:
    dx, dy, dz = _move_toward(hand.position, prop.center)
    new_pos = (hand.position[0] + dx, hand.position[1] + dy, hand.position[2] + dz)
    gamma = HOLD if _dist(new_pos, prop.center) <= GRAB_REACH - 0.02 else 0.0
    return HandAction(dx=dx, dy=dy, dz=dz, gamma=gamma)


def _carry_to(hand: HandState, prop: Prop, prop_target: Vec,
              clamp: float = TRANSLATION_CLAMP) -> HandAction:
    # While grabbed with no rotation applied, the prop tracks the hand at a
    # fixed offset, so steer the hand by the prop's remaining error.
    dx, dy, dz = _move_toward(prop.center, prop_target, clamp)
    return HandAction(dx=dx, dy=dy, dz=dz, gamma=HOLD)


def _policy_cutting(scene: ContinuousScene, hand: HandState) -> HandAction:
    knife = scene.prop_named("knife")
    if hand.grabbed != knife.id:
        return _approach_and_grab(hand, knife)
    carrot = scene.prop_named("carrot")
    # One descent: the blade spans every cut plane, slicing all of them as
    # soon as it drops into the carrot's box.
    return _carry_to(hand, knife, (carrot.center[0], carrot.center[1],
                                   carrot.center[2] + 0.03))


_PEEL_SNAKE = (0, 1, 2, 3, 7, 6, 5)  # row 1 west-east, then row 2 east-west


def _policy_peeling(scene: ContinuousScene, hand: HandState) -> HandAction:
    peeler = scene.prop_named("peeler")
    if hand.grabbed != peeler.id:
        return _approach_and_grab(hand, peeler)
    if sum(scene.flags) >= PEEL_NEEDED:
        return HandAction(gamma=HOLD)
    kiwi = scene.prop_named("kiwi")
    patches = _peel_patches(kiwi)
    target_idx = next(i for i in _PEEL_SNAKE if not scene.flags[i])
    patch = patches[target_idx]
    tip = _add(peeler.center, _mat_vec(peeler.rot, (peeler.half[0], 0.0, 0.0)))
    near = _dist(tip, patch) < 0.08
    dx, dy, dz = _move_toward(tip, patch, 0.02 if near else TRANSLATION_CLAMP)
    return HandAction(dx=dx, dy=dy, dz=dz, gamma=HOLD)


def _policy_can_opening(scene: ContinuousScene, hand: HandState) -> HandAction:
    opener = scene.prop_named("opener")
    if hand.grabbed != opener.id:
        return _approach_and_grab(hand, opener)
    can = scene.prop_named("can")
    sides = _lid_sides(can)
    idx = next(i for i, broken in enumerate(scene.flags) if not broken)
    s1, s2 = sides[idx]
    mid = tuple((a + b) / 2.0 for a, b in zip(s1, s2))
    # Park the blade just above the side's midpoint.
    blade_target = (mid[0], mid[1], can.top_z() + 0.01)
    center_target = (blade_target[0], blade_target[1],
                     blade_target[2] + opener.half[2])
    return _carry_to(hand, opener, center_target)


def _policy_pouring(scene: ContinuousScene, hand: HandState) -> HandAction:
    src = scene.prop_named("cup_source")
    tgt = scene.prop_named("cup_target")
    if hand.grabbed != src.id:
        return _approach_and_grab(hand, src)
    perch = (tgt.center[0] - 0.05, tgt.center[1], 1.02)
    if _dist(src.center, perch) > 0.01:
        return _carry_to(hand, src, perch)
    if _up_dot(src) >= 0.0:
        return HandAction(dtheta=ROTATION_CLAMP, gamma=HOLD)
    return HandAction(gamma=HOLD)  # hold the pour


def _policy_getting_water(scene: ContinuousScene, hand: HandState) -> HandAction:
    cup = scene.prop_named("cup")
    if hand.grabbed != cup.id:
        return _approach_and_grab(hand, cup)
    tap = scene.prop_named("tap")
    under = (tap.center[0], tap.center[1], 1.0)
    if _dist(cup.center, under) > 0.005:
        return _carry_to(hand, cup, under)
    return HandAction(gamma=HOLD)


_POLICIES = {
    "cutting": _policy_cutting,
    "peeling": _policy_peeling,
    "can_opening": _policy_can_opening,
    "pouring": _policy_pouring,
    "getting_water": _policy_getting_water,
}


def scripted_policy(task: str):
    """Reference controller for a tool-use task: (scene, hand) -> HandAction."""
    if task not in _POLICIES:
        raise ConfigError(f"no scripted controller for task {task!r}")
    return _POLICIES[task]


def full_event_total(task: str) -> float:
    """Take reward plus the full event sum a completing run collects.

    Water tasks need eleven transfers: ten of 0.05 reach exactly 0.5,
    and "over fifty percent" is strict.
    """
    events = {"cutting": 3, "peeling": PEEL_NEEDED, "can_opening": 4,
              "pouring": 11, "getting_water": 11}[task]
    return TAKE_REWARD + events * EVENT_REWARD
