"""Benchmark harness: run reference agents, emit CSV reports and curves.

The protocol mirrors the original experiments at desk scale: fixed episode
budgets, success = reaching the goal before the cap (1000 discrete steps,
50 continuous steps), per-episode rows merged in seed order. Identical
configs produce byte-identical CSV files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .agents import AGENT_KINDS, make_agent
from .envs import make_episode
from .errors import ConfigError
from .sceneconf import SceneLibrary
from .tasks import DISCRETE_TASKS
from .textconf import parse_config, parse_float, parse_int
from .tooluse import TAKE_REWARD, TOOLUSE_TASKS, full_event_total

CSV_COLUMNS = ("episode", "seed", "reward", "steps", "success")


@dataclass
class BenchConfig:
    task: str
    scene: str | None = None
    agent: str = "random"
    episodes: int = 100
    seeds: tuple[int, ...] = (1,)
    epsilon_start: float = 0.1
    epsilon_end: float = 0.01
    alpha: float = 0.1
    discount: float = 0.99

    def validate(self) -> None:
        if self.episodes < 1:
            raise ConfigError("episodes must be >= 1")
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        if self.agent not in AGENT_KINDS:
            raise ConfigError(f"unknown agent {self.agent!r}")
        discrete = self.task in DISCRETE_TASKS
        continuous = self.task in TOOLUSE_TASKS
        if not discrete and not continuous:
            raise ConfigError(f"unknown task {self.task!r}")
        if continuous and self.agent != "scripted_continuous":
            raise ConfigError(
                f"agent {self.agent!r} runs discrete tasks; {self.task!r} is continuous")
        if discrete and self.agent == "scripted_continuous":
            raise ConfigError(
                f"agent scripted_continuous runs tool-use tasks, not {self.task!r}")


@dataclass
class BenchReport:
    config: BenchConfig
    rows: list[tuple[int, int, float, int, bool]] = field(default_factory=list)

    def summary(self) -> dict:
        n = len(self.rows)
        successes = sum(1 for r in self.rows if r[4])
        rewards = [r[2] for r in self.rows]
        steps = [r[3] for r in self.rows]
        per_seed_final100 = []
        for seed in self.config.seeds:
            seed_rows = [r for r in self.rows if r[1] == seed]
            tail = seed_rows[-100:]
            if tail:
                per_seed_final100.append(sum(1 for r in tail if r[4]) / len(tail))
        return {
            "task": self.config.task,
            "scene": self.config.scene,
            "agent": self.config.agent,
            "episodes": self.config.episodes,
            "seeds": list(self.config.seeds),
            "runs": n,
            "success_rate": successes / n if n else 0.0,
            "mean_reward": sum(rewards) / n if n else 0.0,
            "mean_steps": sum(steps) / n if n else 0.0,
            "final_100_success": (sum(per_seed_final100) / len(per_seed_final100)
                                  if per_seed_final100 else 0.0),
        }


def parse_bench_config(text: str, source: str = "<bench>") -> BenchConfig:
    doc = parse_config(text, source)
    version = parse_int(doc, doc.require_top("version"))
    if version != 1:
        raise doc.error("unsupported config version", doc.top["version"].line)
    entries = doc.section_map("bench")
    if "task" not in entries:
        raise doc.error("[bench] must define task", doc.section_lines.get("bench"))
    cfg = BenchConfig(task=entries["task"].value)
    if "scene" in entries:
        cfg.scene = entries["scene"].value
    if "agent" in entries:
        cfg.agent = entries["agent"].value
    if "episodes" in entries:
        cfg.episodes = parse_int(doc, entries["episodes"], minimum=1)
    if "seeds" in entries:
        try:
            cfg.seeds = tuple(int(s.strip()) for s in entries["seeds"].value.split(","))
        except ValueError:
            raise doc.error("seeds must be comma-separated integers",
                            entries["seeds"].line)
    for name in ("epsilon_start", "epsilon_end", "alpha", "discount"):
        if name in entries:
            setattr(cfg, name, parse_float(doc, entries[name]))
    cfg.validate()
    return cfg


def run_bench(cfg: BenchConfig, library: SceneLibrary | None = None,
              progress=None) -> BenchReport:
    """Run the configured agent; deterministic given the config."""
    cfg.validate()
    library = library or SceneLibrary()
    report = BenchReport(config=cfg)
    for seed in cfg.seeds:
        agent = make_agent(cfg.agent, seed, episodes=cfg.episodes,
                           epsilon_start=cfg.epsilon_start,
                           epsilon_end=cfg.epsilon_end, alpha=cfg.alpha,
                           discount=cfg.discount)
        for episode_index in range(cfg.episodes):
            episode = make_episode(library, cfg.task, cfg.scene, seed)
            agent.begin_episode(episode)
            total = 0.0
            while not episode.done:
                action = agent.act(episode)
                if episode.mode == "discrete":
                    result = episode.step(action)
                    reward = result.reward
                else:
                    reward, _ = episode.step(action)
                total += reward
                agent.observe(episode, reward, episode.done)
            report.rows.append((episode_index, seed, total, episode.step_count,
                                episode.success))
            if progress is not None:
                progress(seed, episode_index, total, episode.success)
    return report


def write_csv(report: BenchReport, path: str | Path) -> None:
    path = Path(path)
    lines = [",".join(CSV_COLUMNS)]
    for episode, seed, reward, steps, success in report.rows:
        lines.append(f"{episode},{seed},{reward!r},{steps},{int(success)}")
    path.write_text("\n".join(lines) + "\n")


def read_csv(path: str | Path) -> list[tuple[int, int, float, int, bool]]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != ",".join(CSV_COLUMNS):
        raise ConfigError(f"{path}: not a bench report (bad or missing header)")
    rows = []
    for line in lines[1:]:
        episode, seed, reward, steps, success = line.split(",")
        rows.append((int(episode), int(seed), float(reward), int(steps),
                     success == "1"))
    return rows


def write_summary(report: BenchReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")


def moving_average(values: list[float], window: int = 50) -> list[float]:
    out = []
    acc = 0.0
    for i, v in enumerate(values):
        acc += v
        if i >= window:
            acc -= values[i - window]
        out.append(acc / min(i + 1, window))
    return out


def plot_curves(rows: list[tuple[int, int, float, int, bool]], out_png: str | Path,
                *, task: str | None = None, out_csv: str | Path | None = None,
                window: int = 50) -> None:
    """Moving-average reward curves per seed, with tool-use reference lines.

    For continuous tasks a black line marks the take-reward level and a red
    line the full-task reward level.
    """
    if not rows:
        raise ConfigError("empty report: nothing to plot")
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    seeds = sorted({r[1] for r in rows})
    fig, ax = plt.subplots(figsize=(7, 4.5))
    curve_rows = []
    for seed in seeds:
        rewards = [r[2] for r in rows if r[1] == seed]
        avg = moving_average(rewards, window)
        ax.plot(range(len(avg)), avg, label=f"seed {seed}")
        curve_rows.extend((i, seed, v) for i, v in enumerate(avg))
    if task in TOOLUSE_TASKS:
        ax.axhline(TAKE_REWARD, color="black", linewidth=1.2,
                   label=f"take reward ({TAKE_REWARD:g})")
        full = full_event_total(task)
        ax.axhline(full, color="red", linewidth=1.2,
                   label=f"full task ({full:g})")
    ax.set_xlabel("episode")
    ax.set_ylabel(f"reward (moving avg, w={window})")
    if task:
        ax.set_title(task)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)
    if out_csv is not None:
        lines = ["episode,seed,reward_ma"]
        lines.extend(f"{i},{seed},{v!r}" for i, seed, v in curve_rows)
        Path(out_csv).write_text("\n".join(lines) + "\n")
