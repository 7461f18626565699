"""kitchensim command line: serve, scenes, demo, bench."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import parse_bench_config, plot_curves, read_csv, run_bench, \
    write_csv, write_summary
from .demos import replay, stats, validate
from .errors import KitchenSimError
from .sceneconf import SceneLibrary, generate_scene


def _cmd_serve(args) -> int:
    from .server import run_server
    host, _, port = args.bind.rpartition(":")
    run_server(host or "127.0.0.1", int(port), args.scenes, args.max_sessions,
               args.record_dir)
    return 0


def _cmd_scenes_generate(args) -> int:
    text = generate_scene(args.seed, width=args.width, height=args.height,
                          name=args.name)
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_scenes_list(args) -> int:
    library = SceneLibrary(args.scenes)
    for name in library.names():
        print(f"{name}\t{library.kind(name)}")
    return 0


def _cmd_demo_validate(args) -> int:
    report = validate(args.path)
    status = "ok" if report.ok else "invalid"
    if report.ok and report.truncated:
        status = "ok (truncated tail)"
    print(f"{args.path}: {status}, {report.steps} steps")
    for err in report.errors:
        print(f"  error: {err}")
    return 0 if report.ok else 1


def _cmd_demo_replay(args) -> int:
    verdict = replay(args.path, SceneLibrary(args.scenes))
    print(f"{args.path}: {verdict}")
    return 0 if verdict.exact else 1


def _cmd_demo_stats(args) -> int:
    result = stats(args.dir)
    print(f"{'task':16s} {'demos':>6s} {'mean steps':>10s}")
    for task, row in result["tasks"].items():
        print(f"{task:16s} {row['demos']:6d} {row['mean_steps']:10.1f}")
    print(f"total: {result['total']} demos")
    if result["skipped"]:
        print(f"skipped invalid: {', '.join(result['skipped'])}")
    return 0


def _cmd_bench_run(args) -> int:
    cfg = parse_bench_config(Path(args.config).read_text(), source=args.config)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)

    def progress(seed, episode, reward, success):
        if args.verbose and (episode + 1) % 100 == 0:
            print(f"seed {seed} episode {episode + 1}: reward={reward:.2f}"
                  f" success={success}", flush=True)

    report = run_bench(cfg, SceneLibrary(args.scenes),
                       progress=progress if args.verbose else None)
    write_csv(report, outdir / "report.csv")
    write_summary(report, outdir / "summary.json")
    print(json.dumps(report.summary(), indent=2, sort_keys=True))
    print(f"wrote {outdir / 'report.csv'} and {outdir / 'summary.json'}")
    return 0


def _cmd_bench_plot(args) -> int:
    rows = read_csv(args.report)
    task = args.task
    if task is None:
        summary_path = Path(args.report).parent / "summary.json"
        if summary_path.exists():
            task = json.loads(summary_path.read_text()).get("task")
    out_png = args.output or str(Path(args.report).with_suffix(".png"))
    out_csv = str(Path(out_png).with_suffix("")) + "_curve.csv"
    plot_curves(rows, out_png, task=task, out_csv=out_csv)
    print(f"wrote {out_png} and {out_csv}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kitchensim",
        description="Deterministic headless kitchen task environment")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the environment server")
    serve.add_argument("--bind", default="127.0.0.1:7788",
                       help="host:port to listen on (default 127.0.0.1:7788)")
    serve.add_argument("--scenes", default=None, metavar="DIR",
                       help="directory with extra *.scene files")
    serve.add_argument("--max-sessions", type=int, default=32)
    serve.add_argument("--record-dir", default=None, metavar="DIR",
                       help="directory where start_recording may write")
    serve.set_defaults(func=_cmd_serve)

    scenes = sub.add_parser("scenes", help="scene utilities")
    scenes_sub = scenes.add_subparsers(dest="scenes_command", required=True)
    gen = scenes_sub.add_parser("generate", help="emit a random scene document")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--width", type=int, default=None)
    gen.add_argument("--height", type=int, default=None)
    gen.add_argument("--name", default=None)
    gen.add_argument("-o", "--output", default=None)
    gen.set_defaults(func=_cmd_scenes_generate)
    lst = scenes_sub.add_parser("list", help="list known scenes")
    lst.add_argument("--scenes", default=None, metavar="DIR")
    lst.set_defaults(func=_cmd_scenes_list)

    demo = sub.add_parser("demo", help="demonstration trajectory tools")
    demo_sub = demo.add_subparsers(dest="demo_command", required=True)
    dval = demo_sub.add_parser("validate", help="structurally check a trajectory")
    dval.add_argument("path")
    dval.set_defaults(func=_cmd_demo_validate)
    drep = demo_sub.add_parser("replay", help="re-execute and compare digests")
    drep.add_argument("path")
    drep.add_argument("--scenes", default=None, metavar="DIR")
    drep.set_defaults(func=_cmd_demo_replay)
    dstat = demo_sub.add_parser("stats", help="per-task counts and mean lengths")
    dstat.add_argument("dir")
    dstat.set_defaults(func=_cmd_demo_stats)

    bench = sub.add_parser("bench", help="benchmark harness")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)
    brun = bench_sub.add_parser("run", help="run a bench config")
    brun.add_argument("config")
    brun.add_argument("-o", "--output", default="bench_out")
    brun.add_argument("--scenes", default=None, metavar="DIR")
    brun.add_argument("-v", "--verbose", action="store_true")
    brun.set_defaults(func=_cmd_bench_run)
    bplot = bench_sub.add_parser("plot", help="plot curves from a report CSV")
    bplot.add_argument("report")
    bplot.add_argument("-o", "--output", default=None)
    bplot.add_argument("--task", default=None)
    bplot.set_defaults(func=_cmd_bench_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KitchenSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
