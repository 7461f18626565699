"""Trajectory files: recording, validation, truncation, replay, stats."""

from pathlib import Path

import pytest

from kitchensim.agents import ScriptedOptimalAgent
from kitchensim.demos import (TrajectoryRecorder, read_trajectory, replay, stats,
                              validate, write_trajectory)
from kitchensim.envs import DiscreteEpisode
from kitchensim.errors import TrajectoryError

GOLDEN_DEMOS = Path(__file__).parent / "golden" / "demos"


def record_demo(library, tmp_path, task="fruit_juice", scene="kitchen_a", seed=7):
    episode = DiscreteEpisode(library, task, scene, seed)
    agent = ScriptedOptimalAgent()
    agent.begin_episode(episode)
    path = tmp_path / f"{task}.traj"
    rec = TrajectoryRecorder.create(path, task=task, scene=scene, seed=seed,
                                    mode="discrete", initial_digest=episode.digest(),
                                    tick_dt=None)
    while not episode.done:
        action = agent.act(episode)
        result = episode.step(action)
        rec.append(episode.digest(), action.encode(), result.reward, episode.done)
    rec.close()
    return path, episode


def test_record_then_validate_then_replay(library, tmp_path):
    path, episode = record_demo(library, tmp_path)
    report = validate(path)
    assert report.ok and not report.truncated
    assert report.steps == 15
    assert report.header["task"] == "fruit_juice"
    verdict = replay(path, library)
    assert verdict.exact and verdict.steps == 15


def test_unwritable_path_fails_before_episode(library, tmp_path):
    episode = DiscreteEpisode(library, "fruit_juice", "kitchen_a", 7)
    with pytest.raises(TrajectoryError):
        TrajectoryRecorder.create(tmp_path / "no" / "such" / "dir" / "x.traj",
                                  task="fruit_juice", scene="kitchen_a", seed=7,
                                  mode="discrete", initial_digest=episode.digest(),
                                  tick_dt=None)


def test_truncated_tail_tolerated(library, tmp_path):
    path, _ = record_demo(library, tmp_path)
    raw = path.read_bytes()
    # chop mid-way through the final line, as if the writer died
    torn = raw[:-25]
    torn_path = tmp_path / "torn.traj"
    torn_path.write_bytes(torn)
    report = validate(torn_path)
    assert report.ok and report.truncated
    assert report.steps == 14  # the torn step is dropped
    verdict = replay(torn_path, library)
    assert verdict.exact and verdict.steps == 14


def test_tampered_action_diverges(library, tmp_path):
    path, _ = record_demo(library, tmp_path)
    header, steps = read_trajectory(path)
    steps[6]["action"] = {"type": "turn"}
    bad = tmp_path / "tampered.traj"
    write_trajectory(bad, header, steps)
    verdict = replay(bad, library)
    assert not verdict.exact
    assert verdict.divergent_at == 6


def test_roundtrip_byte_identical(library, tmp_path):
    path, _ = record_demo(library, tmp_path)
    header, steps = read_trajectory(path)
    copy1 = tmp_path / "copy1.traj"
    write_trajectory(copy1, header, steps)
    header2, steps2 = read_trajectory(copy1)
    copy2 = tmp_path / "copy2.traj"
    write_trajectory(copy2, header2, steps2)
    assert copy1.read_bytes() == copy2.read_bytes()


def test_gzip_roundtrip_byte_identical(library, tmp_path):
    path, _ = record_demo(library, tmp_path)
    header, steps = read_trajectory(path)
    gz1 = tmp_path / "a.traj.gz"
    gz2 = tmp_path / "b.traj.gz"
    write_trajectory(gz1, header, steps)
    write_trajectory(gz2, *read_trajectory(gz1))
    assert gz1.read_bytes() == gz2.read_bytes()
    assert replay(gz1, library).exact


def test_unknown_version_refused(library, tmp_path):
    path, _ = record_demo(library, tmp_path)
    header, steps = read_trajectory(path)
    header["proto_version"] = 99
    bad = tmp_path / "vnext.traj"
    write_trajectory(bad, header, steps)
    report = validate(bad)
    assert not report.ok
    assert any("proto_version" in e for e in report.errors)
    with pytest.raises(TrajectoryError):
        read_trajectory(bad)


def test_done_before_final_step_rejected(library, tmp_path):
    path, _ = record_demo(library, tmp_path)
    header, steps = read_trajectory(path)
    steps[3]["done"] = True
    bad = tmp_path / "early_done.traj"
    write_trajectory(bad, header, steps)
    assert not validate(bad).ok


def test_noncontiguous_indices_rejected(library, tmp_path):
    path, _ = record_demo(library, tmp_path)
    header, steps = read_trajectory(path)
    steps[5]["index"] = 17
    bad = tmp_path / "gap.traj"
    write_trajectory(bad, header, steps)
    assert not validate(bad).ok


def test_all_golden_demos_replay_exact(library):
    files = sorted(list(GOLDEN_DEMOS.glob("*.traj"))
                   + list(GOLDEN_DEMOS.glob("*.traj.gz")))
    assert len(files) == 30  # 3 per task, 10 tasks
    for path in files:
        verdict = replay(path, library)
        assert verdict.exact, f"{path.name}: {verdict}"


def test_golden_demo_stats(library):
    result = stats(GOLDEN_DEMOS)
    assert result["total"] == 30
    assert set(result["tasks"]) == {
        "fruit_juice", "roast_meat", "stew", "pizza", "sandwich",
        "cutting", "peeling", "can_opening", "pouring", "getting_water"}
    for task, row in result["tasks"].items():
        assert row["demos"] == 3
    # discrete demos average near the reference ~25 steps
    discrete_means = [result["tasks"][t]["mean_steps"]
                      for t in ("fruit_juice", "roast_meat", "stew", "pizza",
                                "sandwich")]
    overall = sum(discrete_means) / len(discrete_means)
    assert 15 <= overall <= 35


def test_stats_skips_invalid_files(tmp_path, library):
    path, _ = record_demo(library, tmp_path)
    (tmp_path / "junk.traj").write_text("not json\n")
    result = stats(tmp_path)
    assert result["total"] == 1
    assert result["skipped"] == ["junk.traj"]
