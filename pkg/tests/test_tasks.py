"""Goal predicates, satisfaction matching, and the reward schedule."""

import pytest

from kitchensim.actions import Action, step_discrete
from kitchensim.tasks import (BUILTIN_TASKS, get_task, goal_satisfied,
                              reward_delta, task_from_doc)
from kitchensim.textconf import parse_config

FRIDGE, CUTBOARD, KNIFE, CUP1, JUICER = 1, 2, 3, 4, 5
OVEN, PLATE1, SAUCE_BOTTLE, POT1, STOVE = 7, 8, 9, 10, 11
TOMATO1, BEEF1, HAM1, CHEDDAR1, BREAD1 = 18, 22, 24, 26, 28


def run(w, task, *pairs):
    total = 0.0
    for verb, target in pairs:
        result = step_discrete(w, Action(verb, target), task)
        assert not result.failed, (verb, target, result.failure_reason)
        w = result.next_state
        total += result.reward
    return w, total


def test_builtin_tasks_shape():
    assert set(BUILTIN_TASKS) == {"fruit_juice", "roast_meat", "stew", "pizza",
                                  "sandwich"}
    juice = get_task("fruit_juice")
    assert len(juice.predicates) == 2
    assert juice.same_target_instance
    assert all(p.target_cls == "cup" for p in juice.predicates)
    assert get_task("sandwich").difficulty == "hard"
    assert get_task("stew").difficulty == "medium"
    assert get_task("fruit_juice").difficulty == "easy"
    for task in BUILTIN_TASKS.values():
        assert task.max_steps == 1000


def test_fresh_scene_bitmap_all_zero(kitchen_a):
    for task in BUILTIN_TASKS.values():
        ok, bitmap = goal_satisfied(kitchen_a, task)
        assert not ok and bitmap == 0


def test_stew_partial_bitmap(kitchen_a):
    """Veg cut+cooked in pot, meat raw -> only the veg predicate holds."""
    stew = get_task("stew")
    w, _ = run(kitchen_a, stew,
               ("navigate", FRIDGE), ("toggle", FRIDGE), ("take", TOMATO1),
               ("navigate", CUTBOARD), ("put_into", CUTBOARD),
               ("navigate", KNIFE), ("use", KNIFE),
               ("navigate", CUTBOARD), ("take", TOMATO1),
               ("navigate", POT1), ("put_into", POT1),
               ("navigate", STOVE), ("use", STOVE))
    ok, bitmap = goal_satisfied(w, stew)
    assert not ok
    assert bitmap == 0b01  # predicate 0 = vegetable


def test_sandwich_full_satisfaction(kitchen_a, plans):
    sandwich = get_task("sandwich")
    w = kitchen_a
    for action in plans.plan("kitchen_a", "sandwich"):
        w = step_discrete(w, action, sandwich).next_state
    ok, bitmap = goal_satisfied(w, sandwich)
    assert ok and bitmap == sandwich.full_mask()


def test_fruit_juice_requires_same_cup(kitchen_a):
    """Each orange prepared in a different cup: not satisfied."""
    juice = get_task("fruit_juice")
    CUP2 = 12
    w, _ = run(kitchen_a, juice,
               ("navigate", FRIDGE), ("toggle", FRIDGE), ("take", 14),
               ("navigate", CUP1), ("put_into", CUP1),
               ("navigate", KNIFE), ("use", KNIFE),
               ("navigate", JUICER), ("use", JUICER))
    # orange1 done in cup1; prepare orange2 fully, then park it in cup2
    w, _ = run(w, juice,
               ("navigate", FRIDGE), ("take", 15),
               ("navigate", CUP1), ("put_into", CUP1),
               ("navigate", KNIFE), ("use", KNIFE),
               ("navigate", JUICER), ("use", JUICER),
               ("navigate", CUP1), ("take", 15),
               ("navigate", CUP2), ("put_into", CUP2))
    ok, bitmap = goal_satisfied(w, juice)
    assert not ok
    assert bin(bitmap).count("1") == 1
    # reunite them: satisfied
    w, _ = run(w, juice,
               ("navigate", CUP2), ("take", 15),
               ("navigate", CUP1), ("put_into", CUP1))
    ok, _ = goal_satisfied(w, juice)
    assert ok


def test_one_ingredient_cannot_witness_two_predicates(kitchen_a):
    """Injective matching: a single finished orange fills only one slot."""
    juice = get_task("fruit_juice")
    w, _ = run(kitchen_a, juice,
               ("navigate", FRIDGE), ("toggle", FRIDGE), ("take", 14),
               ("navigate", CUP1), ("put_into", CUP1),
               ("navigate", KNIFE), ("use", KNIFE),
               ("navigate", JUICER), ("use", JUICER))
    ok, bitmap = goal_satisfied(w, juice)
    assert not ok
    assert bin(bitmap).count("1") == 1


def test_extra_flags_do_not_block(kitchen_a):
    """Sandwich wants veg merely cut; a cooked cut tomato still counts."""
    sandwich = get_task("sandwich")
    w, _ = run(kitchen_a, sandwich,
               ("navigate", FRIDGE), ("toggle", FRIDGE), ("take", TOMATO1),
               ("navigate", PLATE1), ("put_into", PLATE1),
               ("navigate", OVEN), ("use", OVEN))  # cooks the tomato
    w, _ = run(w, sandwich,
               ("navigate", FRIDGE), ("take", TOMATO1 + 1))
    # cut it via the cut board route
    w, _ = run(w, sandwich,
               ("navigate", CUTBOARD), ("put_into", CUTBOARD),
               ("navigate", KNIFE), ("use", KNIFE))
    # tomato1 in plate is cooked but not cut: bitmap empty for veg
    _, bitmap = goal_satisfied(w, sandwich)
    assert not bitmap & 0b1
    # replace with the cut one
    w, _ = run(w, sandwich,
               ("navigate", CUTBOARD), ("take", TOMATO1 + 1),
               ("navigate", PLATE1), ("put_into", PLATE1))
    _, bitmap = goal_satisfied(w, sandwich)
    assert bitmap & 0b1


def test_reward_delta_schedule():
    juice = get_task("fruit_juice")
    assert reward_delta(0b00, 0b01, juice) == 1.0
    assert reward_delta(0b01, 0b01, juice) == 0.0
    assert reward_delta(0b01, 0b11, juice) == 1.0 + 10.0
    pizza = get_task("pizza")
    assert reward_delta(0b01111, 0b11111, pizza) == 1.0 + 10.0
    assert reward_delta(0b00000, 0b00000, pizza) == 0.0


def test_reward_delta_rejects_non_monotone():
    juice = get_task("fruit_juice")
    with pytest.raises(AssertionError):
        reward_delta(0b11, 0b01, juice)


def test_latching_blocks_reward_farming(kitchen_a):
    """put -> take -> put pays the subgoal exactly once."""
    stew = get_task("stew")
    w, r1 = run(kitchen_a, stew,
                ("navigate", FRIDGE), ("toggle", FRIDGE), ("take", BEEF1),
                ("navigate", POT1), ("put_into", POT1),
                ("navigate", STOVE), ("use", STOVE))
    assert r1 == 1.0  # meat cooked in pot
    w, r2 = run(w, stew,
                ("navigate", POT1), ("take", BEEF1), ("put_into", POT1),
                ("take", BEEF1), ("put_into", POT1))
    assert r2 == 0.0


def test_goal_events_in_step_result(kitchen_a):
    stew = get_task("stew")
    w, _ = run(kitchen_a, stew,
               ("navigate", FRIDGE), ("toggle", FRIDGE), ("take", BEEF1),
               ("navigate", POT1), ("put_into", POT1))
    w2 = step_discrete(w, Action("navigate", STOVE), stew).next_state
    result = step_discrete(w2, Action("use", STOVE), stew)
    assert result.events == ("goal:1",)
    assert result.reward == 1.0


def test_custom_task_from_doc():
    doc = parse_config("""
version = 1
[task]
name = warm_bread
difficulty = easy
goal1 = bread cooked -> plate
subgoal_reward = 2.0
""")
    task = task_from_doc(doc)
    assert task.name == "warm_bread"
    assert len(task.predicates) == 1
    assert task.subgoal_reward == 2.0


def test_builtin_task_by_name_from_doc():
    doc = parse_config("version = 1\n[task]\nname = stew\n")
    assert task_from_doc(doc) is get_task("stew")
