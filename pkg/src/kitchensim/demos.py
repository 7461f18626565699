"""Demonstration trajectories: append-only recording, validation, replay.

File format: JSON lines, optionally gzipped (by ``.gz`` extension). The
first line is a header record; each following line is one step::

    {"kind": "header", "proto_version": 1, "task": ..., "scene": ...,
     "seed": ..., "mode": "discrete"|"continuous", "created_at": ...,
     "tick_dt": null|seconds, "initial_digest": hex}
    {"kind": "step", "index": 0, "state_digest": hex, "action": {...},
     "reward": 0.0, "done": false}

Writers append and flush per step, so a file is usable even if the writer
dies mid-episode: the validator accepts the intact prefix and flags the
truncation. Replay re-executes the actions from (task, scene, seed) and
compares post-action digests stepwise.
"""

from __future__ import annotations

import gzip
import io
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .envs import make_episode
from .errors import TrajectoryError
from .sceneconf import SceneLibrary

TRAJ_VERSION = 1
_HEX_RE = re.compile(r"^[0-9a-f]{64}$")


def _open_read(path: Path):
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def _open_write(path: Path):
    if path.suffix == ".gz":
        # mtime=0 keeps gzip output byte-stable for round-trip checks.
        return io.TextIOWrapper(
            gzip.GzipFile(filename="", mode="wb", fileobj=open(path, "wb"), mtime=0),
            encoding="utf-8")
    return open(path, "w", encoding="utf-8")


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class TrajectoryRecorder:
    """Streams one trajectory to disk, header first, one line per step."""

    def __init__(self, path: Path, header: dict):
        self.path = Path(path)
        self.header = header
        self._index = 0
        try:
            self._fh = _open_write(self.path)
            self._fh.write(_dump(header) + "\n")
            self._fh.flush()
        except OSError as exc:
            raise TrajectoryError(f"cannot open {path} for recording: {exc}") from exc

    @classmethod
    def create(cls, path, *, task: str, scene: str, seed: int, mode: str,
               initial_digest: str, tick_dt: float | None) -> "TrajectoryRecorder":
        header = {
            "kind": "header",
            "proto_version": TRAJ_VERSION,
            "task": task,
            "scene": scene,
            "seed": seed,
            "mode": mode,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "tick_dt": tick_dt,
            "initial_digest": initial_digest,
        }
        return cls(Path(path), header)

    def append(self, state_digest: str, action: dict, reward: float, done: bool) -> None:
        line = _dump({"kind": "step", "index": self._index,
                      "state_digest": state_digest, "action": action,
                      "reward": reward, "done": done})
        self._fh.write(line + "\n")
        self._fh.flush()
        self._index += 1

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


@dataclass
class ValidationReport:
    ok: bool
    path: str
    header: dict | None = None
    steps: int = 0
    truncated: bool = False
    errors: list[str] = field(default_factory=list)


def read_trajectory(path: str | Path) -> tuple[dict, list[dict]]:
    """Strict read: raises TrajectoryError on any structural problem."""
    report = validate(path)
    if not report.ok:
        raise TrajectoryError(f"{path}: " + "; ".join(report.errors))
    header, steps, _ = _read_lines(Path(path))
    return header, steps


def write_trajectory(path: str | Path, header: dict, steps: list[dict]) -> None:
    path = Path(path)
    with _open_write(path) as fh:
        fh.write(_dump(header) + "\n")
        for step in steps:
            fh.write(_dump(step) + "\n")


def _read_lines(path: Path) -> tuple[dict | None, list[dict], bool]:
    """Returns (header, steps, truncated); tolerates a torn final line."""
    header = None
    steps: list[dict] = []
    truncated = False
    with _open_read(path) as fh:
        raw = fh.read()
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        truncated = True  # no final newline: the last line may be torn
    for i, line in enumerate(lines):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            if i == len(lines) - 1:
                truncated = True
                break
            raise TrajectoryError(f"{path}: line {i + 1} is not valid JSON")
        if i == 0:
            header = obj
        else:
            steps.append(obj)
    return header, steps, truncated


def validate(path: str | Path) -> ValidationReport:
    path = Path(path)
    report = ValidationReport(ok=True, path=str(path))

    def fail(msg: str) -> ValidationReport:
        report.ok = False
        report.errors.append(msg)
        return report

    try:
        header, steps, truncated = _read_lines(path)
    except (OSError, TrajectoryError) as exc:
        return fail(str(exc))
    report.truncated = truncated
    if header is None:
        return fail("empty file: no header line")
    if header.get("kind") != "header":
        return fail("first line is not a header record")
    if header.get("proto_version") != TRAJ_VERSION:
        return fail(f"unsupported proto_version {header.get('proto_version')!r}")
    for key in ("task", "scene", "seed", "mode", "initial_digest"):
        if key not in header:
            return fail(f"header missing field {key!r}")
    if header["mode"] not in ("discrete", "continuous"):
        return fail(f"unknown mode {header['mode']!r}")
    if not _HEX_RE.match(str(header["initial_digest"])):
        return fail("initial_digest is not a 64-hex-character digest")
    report.header = header

    for i, step in enumerate(steps):
        where = f"step line {i}"
        if step.get("kind") != "step":
            return fail(f"{where}: kind is not 'step'")
        if step.get("index") != i:
            return fail(f"{where}: index {step.get('index')} != {i}")
        if not _HEX_RE.match(str(step.get("state_digest", ""))):
            return fail(f"{where}: bad state_digest")
        if not isinstance(step.get("action"), dict):
            return fail(f"{where}: action is not an object")
        if not isinstance(step.get("reward"), (int, float)):
            return fail(f"{where}: reward is not a number")
        if not isinstance(step.get("done"), bool):
            return fail(f"{where}: done is not a boolean")
        if step["done"] and i != len(steps) - 1:
            return fail(f"{where}: done=true before the final step")
    report.steps = len(steps)
    return report


@dataclass
class ReplayVerdict:
    exact: bool
    steps: int
    divergent_at: int | None = None
    expected: str | None = None
    actual: str | None = None
    message: str = ""

    def __str__(self) -> str:
        if self.exact:
            return f"exact ({self.steps} steps)"
        return (f"divergent at step {self.divergent_at}: "
                f"recorded {self.expected} vs replayed {self.actual} {self.message}")


def replay(path: str | Path, library: SceneLibrary | None = None) -> ReplayVerdict:
    """Re-execute a trajectory and compare digests stepwise."""
    from .actions import decode_action
    from .tooluse import decode_hand_action

    header, steps = read_trajectory(path)
    library = library or SceneLibrary()
    episode = make_episode(library, header["task"], header["scene"], header["seed"])
    if episode.digest() != header["initial_digest"]:
        return ReplayVerdict(exact=False, steps=0, divergent_at=-1,
                             expected=header["initial_digest"], actual=episode.digest(),
                             message="(initial state)")
    for i, step in enumerate(steps):
        if header["mode"] == "discrete":
            episode.step(decode_action(step["action"]))
        else:
            episode.step(decode_hand_action(step["action"]))
        actual = episode.digest()
        if actual != step["state_digest"]:
            return ReplayVerdict(exact=False, steps=i, divergent_at=i,
                                 expected=step["state_digest"], actual=actual)
    return ReplayVerdict(exact=True, steps=len(steps))


def stats(directory: str | Path) -> dict:
    """Per-task demo counts and mean lengths for a directory of trajectories."""
    directory = Path(directory)
    per_task: dict[str, list[int]] = {}
    skipped: list[str] = []
    files = sorted(list(directory.glob("*.traj")) + list(directory.glob("*.traj.gz")))
    for path in files:
        report = validate(path)
        if not report.ok:
            skipped.append(path.name)
            continue
        per_task.setdefault(report.header["task"], []).append(report.steps)
    return {
        "tasks": {
            task: {"demos": len(lengths),
                   "mean_steps": sum(lengths) / len(lengths) if lengths else 0.0}
            for task, lengths in sorted(per_task.items())
        },
        "total": sum(len(v) for v in per_task.values()),
        "skipped": skipped,
    }
