"""Scene config documents: parsing, loading into WorldState, generation.

A scene document has four sections::

    version = 1
    name = kitchen_a

    [grid]
    width = 11
    height = 7

    [stations]            # fixed tools and receptacles, one per cell
    fridge1 = fridge @ 1,0
    cup1 = cup @ 6,0 capacity=2

    [objects]             # ingredients: set/variant in <receptacle|auto>
    orange1 = fruit/orange in fridge1
    tomato1 = vegetable/tomato in fridge1 states=cut

    [spawn]
    cell = 5,3
    facing = N

``in auto`` placement follows the utility rule: perishables go into a
fridge, everything else onto a random open receptacle with spare room; the
choice draws from the seed-determined RNG so loads are reproducible.

Object ids are assigned in document order, stations first, so a config is
also an id map. Parse and validation errors cite the line number.
"""

from __future__ import annotations

import random
import re
from importlib import resources
from pathlib import Path

from . import catalog
from .errors import ConfigError, LayoutError
from .textconf import ConfigDoc, ConfigEntry, parse_config, parse_int
from .world import AgentPose, FACINGS, ObjectInstance, SceneStatic, WorldState

CONFIG_VERSION = 1
BUNDLED_SCENES = ("kitchen_a", "kitchen_b", "kitchen_c")
BUNDLED_TOOLUSE = ("tool_cutting", "tool_peeling", "tool_can_opening",
                   "tool_pouring", "tool_getting_water")

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def _parse_cell(doc: ConfigDoc, text: str, line: int) -> tuple[int, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise doc.error(f"expected 'x,y', got {text!r}", line)
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise doc.error(f"cell coordinates must be integers, got {text!r}", line)


def _parse_opts(doc: ConfigDoc, tokens: list[str], line: int) -> dict[str, str]:
    opts: dict[str, str] = {}
    for tok in tokens:
        if "=" not in tok:
            raise doc.error(f"expected option 'key=value', got {tok!r}", line)
        key, value = tok.split("=", 1)
        if key in opts:
            raise doc.error(f"duplicate option {key!r}", line)
        opts[key] = value
    return opts


class _CountingRng:
    """random.Random wrapper that counts draws, for compact rng_state."""

    def __init__(self, seed: int):
        self._rng = random.Random(seed)
        self.seed = seed
        self.draws = 0

    def choice(self, seq):
        self.draws += 1
        return self._rng.choice(seq)

    def state(self) -> tuple:
        return ("py3", self.seed, self.draws)


def _build_station(doc: ConfigDoc, entry: ConfigEntry, oid: int) -> tuple[ObjectInstance, tuple[int, int]]:
    name = entry.key
    if not _NAME_RE.match(name):
        raise doc.error(f"bad station name {name!r}", entry.line)
    tokens = entry.value.split()
    if len(tokens) < 3 or tokens[1] != "@":
        raise doc.error(f"expected '<class> @ x,y [opts]', got {entry.value!r}", entry.line)
    cls = tokens[0]
    cell = _parse_cell(doc, tokens[2], entry.line)
    opts = _parse_opts(doc, tokens[3:], entry.line)

    if catalog.is_tool(cls):
        spawn_variant = opts.pop("variant", catalog.DEFAULT_SAUCE_VARIANT)
        if cls == catalog.SPAWNS_SAUCE and spawn_variant not in catalog.VARIANTS["sauce"]:
            raise doc.error(f"unknown sauce variant {spawn_variant!r}", entry.line)
        if opts:
            raise doc.error(f"unknown tool option {next(iter(opts))!r}", entry.line)
        obj = ObjectInstance(id=oid, kind="tool", cls=cls,
                             spawn_variant=spawn_variant if cls == catalog.SPAWNS_SAUCE else "",
                             loc=("cell", cell[0], cell[1]))
    elif catalog.is_receptacle(cls):
        capacity = catalog.RECEPTACLE_CAPACITY[cls]
        if "capacity" in opts:
            try:
                capacity = int(opts.pop("capacity"))
            except ValueError:
                raise doc.error("capacity must be an integer", entry.line)
            if capacity < 1:
                raise doc.error("capacity must be positive", entry.line)
        open_flag: bool | None = None
        if cls in catalog.CONTAINER_RECEPTACLES:
            open_flag = False
            if "open" in opts:
                open_flag = opts.pop("open").lower() in ("true", "yes", "1")
        elif "open" in opts:
            raise doc.error(f"{cls!r} is not a container; 'open' not allowed", entry.line)
        if opts:
            raise doc.error(f"unknown receptacle option {next(iter(opts))!r}", entry.line)
        obj = ObjectInstance(id=oid, kind="receptacle", cls=cls, open=open_flag,
                             capacity=capacity, loc=("cell", cell[0], cell[1]))
    else:
        raise doc.error(f"unknown station class {cls!r}", entry.line)
    return obj, cell


def _build_ingredient(doc: ConfigDoc, entry: ConfigEntry, oid: int,
                      station_ids: dict[str, int]) -> tuple[ObjectInstance, str]:
    """Returns the instance plus the placement target name ('auto' or station)."""
    name = entry.key
    if not _NAME_RE.match(name):
        raise doc.error(f"bad object name {name!r}", entry.line)
    tokens = entry.value.split()
    if len(tokens) < 3 or tokens[1] != "in":
        raise doc.error(f"expected '<set>/<variant> in <receptacle|auto>', got {entry.value!r}",
                        entry.line)
    if "/" not in tokens[0]:
        raise doc.error(f"expected '<set>/<variant>', got {tokens[0]!r}", entry.line)
    set_name, variant = tokens[0].split("/", 1)
    if set_name not in catalog.INGREDIENT_SETS:
        raise doc.error(f"unknown ingredient set {set_name!r}", entry.line)
    if variant not in catalog.VARIANTS[set_name]:
        raise doc.error(f"unknown {set_name} variant {variant!r}", entry.line)
    target = tokens[2]
    if target != "auto" and target not in station_ids:
        raise doc.error(f"unknown receptacle {target!r}", entry.line)
    opts = _parse_opts(doc, tokens[3:], entry.line)
    states = 0
    if "states" in opts:
        for flag in opts.pop("states").split(","):
            flag = flag.strip()
            if flag not in catalog.STATE_BIT:
                raise doc.error(f"unknown state flag {flag!r}", entry.line)
            states |= catalog.STATE_BIT[flag]
        if states & ~catalog.ALLOWED_STATES[set_name]:
            raise doc.error(f"state not allowed for set {set_name!r}", entry.line)
    if opts:
        raise doc.error(f"unknown object option {next(iter(opts))!r}", entry.line)
    obj = ObjectInstance(id=oid, kind="ingredient", cls=variant, set_name=set_name,
                         states=states, loc=("held",))
    return obj, target


def load_scene_text(text: str, seed: int, source: str = "<scene>") -> WorldState:
    """Parse a scene document and instantiate the world it describes."""
    doc = parse_config(text, source)
    version = parse_int(doc, doc.require_top("version"))
    if version != CONFIG_VERSION:
        raise doc.error(f"unsupported config version {version}", doc.top["version"].line)
    scene_name = doc.require_top("name").value

    grid = doc.section_map("grid")
    if "width" not in grid or "height" not in grid:
        raise doc.error("[grid] must define width and height",
                        doc.section_lines.get("grid"))
    width = parse_int(doc, grid["width"], minimum=2)
    height = parse_int(doc, grid["height"], minimum=2)

    objects: list[ObjectInstance] = []
    station_ids: dict[str, int] = {}
    station_cells: dict[int, tuple[int, int]] = {}
    for entry in doc.require_section("stations"):
        oid = len(objects) + 1
        obj, cell = _build_station(doc, entry, oid)
        if not (0 <= cell[0] < width and 0 <= cell[1] < height):
            raise doc.error(f"station {entry.key!r} at {cell} is outside the grid", entry.line)
        if cell in station_cells.values():
            raise doc.error(f"station {entry.key!r} overlaps another station at {cell}",
                            entry.line)
        objects.append(obj)
        station_ids[entry.key] = oid
        station_cells[oid] = cell

    rng = _CountingRng(seed)
    receptacles = [o for o in objects if o.kind == "receptacle"]
    placements: list[tuple[int, str]] = []  # (object index, target name or "auto")
    for entry in doc.sections.get("objects", []):
        oid = len(objects) + 1
        obj, target = _build_ingredient(doc, entry, oid, station_ids)
        if target != "auto" and objects[station_ids[target] - 1].kind != "receptacle":
            raise doc.error(f"{target!r} is not a receptacle", entry.line)
        objects.append(obj)
        placements.append((oid - 1, target))

    # Resolve placements; track load so capacities hold from step zero.
    load_count = {o.id: 0 for o in receptacles}

    def place(idx: int, rid: int, entry_line: int | None) -> None:
        recv = objects[rid - 1]
        if load_count[rid] >= recv.capacity:
            raise ConfigError(f"receptacle id {rid} over capacity", source=source,
                              line=entry_line)
        load_count[rid] += 1
        objects[idx] = ObjectInstance(
            id=objects[idx].id, kind="ingredient", cls=objects[idx].cls,
            set_name=objects[idx].set_name, states=objects[idx].states,
            loc=("in", rid))

    entries = doc.sections.get("objects", [])
    for (idx, target), entry in zip(placements, entries):
        if target != "auto":
            place(idx, station_ids[target], entry.line)
            continue
        ing = objects[idx]
        if ing.set_name in catalog.PERISHABLE_SETS:
            pool = [r for r in receptacles if r.cls == "fridge"
                    and load_count[r.id] < r.capacity]
        else:
            pool = [r for r in receptacles if r.cls not in catalog.CONTAINER_RECEPTACLES
                    and load_count[r.id] < r.capacity]
        if not pool:
            raise doc.error(f"no room to auto-place {entry.key!r}", entry.line)
        place(idx, rng.choice(pool).id, entry.line)

    spawn = doc.section_map("spawn")
    if "cell" not in spawn:
        raise doc.error("[spawn] must define cell", doc.section_lines.get("spawn"))
    spawn_cell = _parse_cell(doc, spawn["cell"].value, spawn["cell"].line)
    facing = spawn["facing"].value if "facing" in spawn else "N"
    if facing not in FACINGS:
        raise doc.error(f"facing must be one of {FACINGS}", spawn["facing"].line)

    try:
        static = SceneStatic(scene_name, width, height, station_cells)
    except LayoutError as exc:
        raise ConfigError(str(exc), source=source) from exc
    if not static.is_free(spawn_cell):
        raise doc.error(f"spawn cell {spawn_cell} is not a free cell",
                        spawn["cell"].line)

    return WorldState(scene=static, objects=tuple(objects),
                      agent=AgentPose(cell=spawn_cell, facing=facing),
                      step=0, goal_latched=0, goal_bonus_paid=False,
                      rng_state=rng.state())


def load_scene_file(path: str | Path, seed: int) -> WorldState:
    path = Path(path)
    return load_scene_text(path.read_text(), seed, source=str(path))


def bundled_scene_text(name: str) -> str:
    if name not in BUNDLED_SCENES and name not in BUNDLED_TOOLUSE:
        known = ", ".join(BUNDLED_SCENES + BUNDLED_TOOLUSE)
        raise ConfigError(f"unknown bundled scene {name!r}; have {known}")
    return resources.files("kitchensim.scenes").joinpath(f"{name}.scene").read_text()


class SceneLibrary:
    """Named scene documents: bundled ones plus any ``*.scene`` in a directory.

    Holds both discrete kitchen layouts and continuous tool-use prop
    layouts; ``kind`` distinguishes them by their sections.
    """

    def __init__(self, extra_dir: str | Path | None = None):
        self._texts: dict[str, str] = {
            n: bundled_scene_text(n) for n in BUNDLED_SCENES + BUNDLED_TOOLUSE}
        if extra_dir is not None:
            for path in sorted(Path(extra_dir).glob("*.scene")):
                self._texts[path.stem] = path.read_text()
        # (name, seed) -> initial WorldState. States are immutable values,
        # so handing the same one to every episode is safe and skips the
        # navigation-table rebuild on each reset.
        self._load_cache: dict[tuple[str, int], WorldState] = {}

    def names(self) -> list[str]:
        return sorted(self._texts)

    def text(self, name: str) -> str:
        if name not in self._texts:
            raise ConfigError(f"unknown scene {name!r}; have {', '.join(self.names())}")
        return self._texts[name]

    def kind(self, name: str) -> str:
        doc = parse_config(self.text(name), source=name)
        return "tooluse" if "tooluse" in doc.sections else "discrete"

    def load(self, name: str, seed: int) -> WorldState:
        key = (name, seed)
        cached = self._load_cache.get(key)
        if cached is None:
            if self.kind(name) != "discrete":
                raise ConfigError(f"scene {name!r} is a tool-use layout, not a kitchen")
            cached = load_scene_text(self.text(name), seed, source=name)
            self._load_cache[key] = cached
        return cached


def generate_scene(seed: int, width: int | None = None, height: int | None = None,
                   name: str | None = None) -> str:
    """Emit a random but well-formed scene document.

    The layout keeps the adjacency motifs every dish needs: a prep strip
    (cut board, knife, cup, juicer), a bake strip (oven, plate, sauce
    bottle), and a hob pair (pot, stove), placed on random walls, so all
    five dishes stay solvable.
    """
    rng = random.Random(seed)
    width = width or rng.randint(10, 13)
    height = height or rng.randint(6, 8)
    name = name or f"generated_{seed}"

    blocks = [
        [("cutboard1", "cut_board"), ("knife1", "knife"), ("cup1", "cup"), ("juicer1", "juicer")],
        [("oven1", "oven"), ("plate1", "plate"), ("saucebottle1", "sauce_bottle")],
        [("pot1", "pot"), ("stove1", "stove")],
        [("fridge1", "fridge")],
        [("grater1", "grater")],
        [("cup2", "cup")],
    ]
    sides = {
        "top": [(x, 0) for x in range(1, width - 1)],
        "bottom": [(x, height - 1) for x in range(1, width - 1)],
        "left": [(0, y) for y in range(1, height - 1)],
        "right": [(width - 1, y) for y in range(1, height - 1)],
    }
    used: set[tuple[int, int]] = set()
    lines = [f"version = {CONFIG_VERSION}", f"name = {name}", "",
             "[grid]", f"width = {width}", f"height = {height}", "", "[stations]"]
    for block in blocks:
        placed = False
        for _ in range(200):
            side = rng.choice(sorted(sides))
            cells = sides[side]
            if len(cells) < len(block):
                continue
            start = rng.randrange(0, len(cells) - len(block) + 1)
            run = cells[start:start + len(block)]
            if any(c in used for c in run):
                continue
            for (label, cls), cell in zip(block, run):
                lines.append(f"{label} = {cls} @ {cell[0]},{cell[1]}")
            used.update(run)
            placed = True
            break
        if not placed:
            raise LayoutError(f"generator could not place block {block} (seed {seed})")

    lines += ["", "[objects]"]
    stock = [
        ("fruit", "orange", 2), ("fruit", "kiwi", 1),
        ("vegetable", "tomato", 2), ("vegetable", "carrot", 1),
        ("meat", "beef", 1), ("meat", "chicken", 1),
        ("coldcut", "ham", 1), ("cheese", "cheddar", 1),
        ("bread", "white_bread", 1), ("dough", "pizza_dough", 1),
    ]
    counter = 0
    for set_name, variant, count in stock:
        for _ in range(count):
            counter += 1
            lines.append(f"item{counter} = {set_name}/{variant} in fridge1")

    # Spawn in the middle; interior cells are always free.
    lines += ["", "[spawn]", f"cell = {width // 2},{height // 2}", "facing = N", ""]
    return "\n".join(lines)
