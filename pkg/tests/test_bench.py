"""Bench harness: reproducibility, accounting, CSV format, plots."""

import pytest

from kitchensim.bench import (BenchConfig, parse_bench_config, plot_curves,
                              read_csv, run_bench, write_csv)
from kitchensim.errors import ConfigError
from kitchensim.tooluse import full_event_total

PINNED_LENGTHS = {"fruit_juice": 15, "stew": 18, "roast_meat": 20,
                  "sandwich": 29, "pizza": 31}


def test_parse_bench_config():
    cfg = parse_bench_config("""
version = 1
[bench]
task = fruit_juice
scene = kitchen_a
agent = tabular_q
episodes = 50
seeds = 1,2
alpha = 0.2
""")
    assert cfg.task == "fruit_juice"
    assert cfg.seeds == (1, 2)
    assert cfg.alpha == 0.2


def test_config_mode_mismatch_rejected():
    with pytest.raises(ConfigError):
        BenchConfig(task="cutting", agent="tabular_q").validate()
    with pytest.raises(ConfigError):
        BenchConfig(task="stew", agent="scripted_continuous").validate()
    with pytest.raises(ConfigError):
        BenchConfig(task="stew", episodes=0).validate()
    with pytest.raises(ConfigError):
        BenchConfig(task="stew", seeds=()).validate()


def test_scripted_optimal_all_dishes(library):
    """Success rate 1.0 with steps equal to the pinned plan lengths."""
    for task, steps in sorted(PINNED_LENGTHS.items()):
        cfg = BenchConfig(task=task, scene="kitchen_a", agent="scripted_optimal",
                          episodes=2, seeds=(7,))
        report = run_bench(cfg, library)
        summary = report.summary()
        assert summary["success_rate"] == 1.0, task
        assert all(r[3] == steps for r in report.rows), task


def test_scripted_continuous_all_tasks(library):
    for task in ("cutting", "peeling", "can_opening", "pouring", "getting_water"):
        cfg = BenchConfig(task=task, agent="scripted_continuous", episodes=1,
                          seeds=(1,))
        report = run_bench(cfg, library)
        assert report.summary()["success_rate"] == 1.0
        assert report.rows[0][2] == full_event_total(task)
        assert report.rows[0][3] <= 50


def test_random_agent_never_makes_sandwich(library):
    cfg = BenchConfig(task="sandwich", scene="kitchen_a", agent="random",
                      episodes=5, seeds=(1,))
    report = run_bench(cfg, library)
    assert report.summary()["success_rate"] == 0.0
    assert all(r[3] == 1000 for r in report.rows)


def test_reproducible_csv_bytes(library, tmp_path):
    cfg = BenchConfig(task="fruit_juice", scene="kitchen_a", agent="random",
                      episodes=3, seeds=(1, 2))
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    write_csv(run_bench(cfg, library), a)
    write_csv(run_bench(cfg, library), b)
    assert a.read_bytes() == b.read_bytes()


def test_csv_columns_and_roundtrip(library, tmp_path):
    cfg = BenchConfig(task="fruit_juice", scene="kitchen_a", agent="scripted_optimal",
                      episodes=2, seeds=(7,))
    report = run_bench(cfg, library)
    path = tmp_path / "report.csv"
    write_csv(report, path)
    first = path.read_text().splitlines()[0]
    assert first == "episode,seed,reward,steps,success"
    rows = read_csv(path)
    assert rows == report.rows


def test_reward_accounting_identity(library):
    """Per-episode reward equals the sum of per-step reward deltas."""
    from kitchensim.agents import make_agent
    from kitchensim.envs import make_episode
    agent = make_agent("random", 5)
    episode = make_episode(library, "stew", "kitchen_a", 7)
    agent.begin_episode(episode)
    total = 0.0
    step_rewards = []
    while not episode.done:
        result = episode.step(agent.act(episode))
        step_rewards.append(result.reward)
        total += result.reward
    assert total == pytest.approx(sum(step_rewards))
    cfg = BenchConfig(task="stew", scene="kitchen_a", agent="random",
                      episodes=1, seeds=(5,))
    report = run_bench(cfg, library)
    assert report.rows[0][2] == pytest.approx(total)


def test_plot_curves_writes_artifacts(library, tmp_path):
    cfg = BenchConfig(task="cutting", agent="scripted_continuous", episodes=4,
                      seeds=(1,))
    report = run_bench(cfg, library)
    png = tmp_path / "curve.png"
    csv = tmp_path / "curve.csv"
    plot_curves(report.rows, png, task="cutting", out_csv=csv)
    assert png.stat().st_size > 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "episode,seed,reward_ma"
    # scripted controller sits at the full-task level from episode one
    assert float(lines[1].split(",")[2]) == full_event_total("cutting")


def test_plot_empty_report_is_error(tmp_path):
    with pytest.raises(ConfigError):
        plot_curves([], tmp_path / "x.png")
    assert not (tmp_path / "x.png").exists()
