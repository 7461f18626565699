"""Static taxonomy of the kitchen world.

Everything here is data, not behaviour: ingredient sets and their variants,
which state changes each set admits, what each tool does, and receptacle
properties. The action engine and goal checker consult these tables; they
never hard-code a class name.
"""

from __future__ import annotations

# State flags are kept as a bitmask on ObjectInstance so they hash and copy
# cheaply. Order here fixes the bit layout and the canonical name order.
STATE_NAMES = ("cut", "peeled", "cooked", "juiced")
STATE_BIT = {name: 1 << i for i, name in enumerate(STATE_NAMES)}

CUT = STATE_BIT["cut"]
PEELED = STATE_BIT["peeled"]
COOKED = STATE_BIT["cooked"]
JUICED = STATE_BIT["juiced"]

INGREDIENT_SETS = (
    "fruit",
    "meat",
    "vegetable",
    "coldcut",
    "cheese",
    "sauce",
    "bread",
    "dough",
)

# Declared affordance table: which state changes each ingredient set admits.
# Juicing is reserved for fruit and vegetable; bread and meat (and the other
# solid sets) can never be juiced. Everything can be cooked; peeling is a
# fruit/vegetable affair.
ALLOWED_STATES: dict[str, int] = {
    "fruit": CUT | PEELED | COOKED | JUICED,
    "vegetable": CUT | PEELED | COOKED | JUICED,
    "meat": CUT | COOKED,
    "coldcut": CUT | COOKED,
    "cheese": CUT | COOKED,
    "sauce": COOKED,
    "bread": CUT | COOKED,
    "dough": CUT | COOKED,
}

# Known variants per set. Scene configs may only reference these; uniqueness
# within a set is by construction.
VARIANTS: dict[str, tuple[str, ...]] = {
    "fruit": ("orange", "kiwi", "apple", "banana"),
    "meat": ("beef", "chicken", "pork"),
    "vegetable": ("tomato", "carrot", "potato", "onion"),
    "coldcut": ("ham", "turkey", "salami"),
    "cheese": ("cheddar", "mozzarella"),
    "sauce": ("tomato_sauce", "bbq_sauce"),
    "bread": ("white_bread", "baguette"),
    "dough": ("pizza_dough",),
}

VARIANT_SET: dict[str, str] = {
    variant: set_name for set_name, names in VARIANTS.items() for variant in names
}

# Sets whose members belong in the fridge when a config asks for automatic
# placement ("perishables in the fridge"); the rest go onto open receptacles.
PERISHABLE_SETS = frozenset({"fruit", "vegetable", "meat", "coldcut", "cheese"})

TOOL_NAMES = ("grater", "juicer", "knife", "oven", "sauce_bottle", "stove")

# Each tool maps to exactly one effect. The sauce bottle is special: instead
# of flipping a state flag it spawns a fresh sauce ingredient, so its effect
# bit is 0 and the engine branches on SPAWNS_SAUCE.
TOOL_EFFECT: dict[str, int] = {
    "grater": CUT,
    "juicer": JUICED,
    "knife": CUT,
    "oven": COOKED,
    "stove": COOKED,
    "sauce_bottle": 0,
}

SPAWNS_SAUCE = "sauce_bottle"
DEFAULT_SAUCE_VARIANT = "tomato_sauce"

RECEPTACLE_NAMES = ("fridge", "plate", "cut_board", "pot", "cup")

# Only the fridge is a container (openable; contents unreachable while shut).
CONTAINER_RECEPTACLES = frozenset({"fridge"})

RECEPTACLE_CAPACITY: dict[str, int] = {
    "fridge": 32,
    "plate": 8,
    "pot": 8,
    "cup": 2,
    "cut_board": 1,
}

# Stable small integers for the semantic raster. 0 is reserved for empty /
# out-of-bounds cells; the agent is deliberately not rendered (it is always
# the window centre).
RASTER_CLASS_IDS: dict[str, int] = {
    name: i + 1 for i, name in enumerate(TOOL_NAMES + RECEPTACLE_NAMES)
}


def states_to_mask(names: list[str] | tuple[str, ...]) -> int:
    mask = 0
    for name in names:
        mask |= STATE_BIT[name]
    return mask


def mask_to_states(mask: int) -> tuple[str, ...]:
    return tuple(name for name in STATE_NAMES if mask & STATE_BIT[name])


def is_tool(name: str) -> bool:
    return name in TOOL_EFFECT


def is_receptacle(name: str) -> bool:
    return name in RECEPTACLE_CAPACITY
