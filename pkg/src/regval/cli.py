"""Command-line front end: synthesize, serve the HTTP API, run benchmarks."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import engine, orchestrator
from .model import BenchmarkFormatError, ExampleSetError, parse_benchmark

EXIT_OK = 0
EXIT_FAILED = 2
EXIT_BEST_EFFORT = 3
EXIT_USAGE = 64
EXIT_IO = 66


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="regval", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="synthesize a regex validation from examples")
    synth.add_argument("--input", required=True, help="benchmark file (++/--/+- sections)")
    synth.add_argument("--mode", choices=["multitree", "ktree"], default="multitree")
    synth.add_argument("--no-pruning", action="store_true", help="disable equivalence pruning")
    synth.add_argument("--no-split", action="store_true", help="force dynamic multi-tree")
    synth.add_argument(
        "--interaction",
        default="tty",
        help="tty, accept-first, or oracle:<validation-file>",
    )
    synth.add_argument("--timeout", type=float, default=3600.0, help="global budget in seconds")
    synth.add_argument("--output", choices=["text", "json"], default="text")
    synth.add_argument("--solver", default=None, help="SMT-LIB solver command (default: builtin)")

    serve = sub.add_parser("serve", help="run the HTTP session service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--static-dir", default=None, help="directory with the web UI build")

    bench = sub.add_parser("bench", help="run the benchmark suite")
    bench.add_argument("--corpus", default=None, help="corpus directory (default: bundled)")
    bench.add_argument("--modes", default="multitree", help="comma list: multitree,ktree,no-pruning,dynamic-only")
    bench.add_argument("--timeout", type=float, default=60.0, help="per-case budget in seconds")
    bench.add_argument("--seed", type=int, default=1)
    bench.add_argument("--subsample", type=int, default=None, help="cap valid/invalid examples per case")
    bench.add_argument("--csv", default=None, help="write the report as CSV to this path")
    return parser


def _make_oracle(spec: str):
    if spec == "tty":
        def ask(question, session):
            phase = "pattern" if question.phase == "regex" else "value"
            try:
                while True:
                    raw = input(f'{phase} question: is "{question.text}" valid? [y/n] ')
                    if raw.lower() in ("y", "yes"):
                        return True
                    if raw.lower() in ("n", "no"):
                        return False
            except EOFError:
                return None

        return orchestrator.CallbackOracle(ask)
    if spec == "accept-first":
        return orchestrator.AcceptFirstOracle()
    if spec.startswith("oracle:"):
        path = spec.split(":", 1)[1]
        truth = engine.parse_validation(Path(path).read_text(encoding="utf-8"))
        return orchestrator.GroundTruthOracle(truth)
    raise ValueError(f"unknown interaction mode {spec!r}")


def _cmd_synth(args) -> int:
    try:
        text = Path(args.input).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"regval: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        examples = parse_benchmark(text)
    except (BenchmarkFormatError, ExampleSetError) as exc:
        print(f"regval: bad benchmark file: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        oracle = _make_oracle(args.interaction)
    except OSError as exc:
        print(f"regval: cannot read oracle file: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, engine.RegexParseError) as exc:
        print(f"regval: {exc}", file=sys.stderr)
        return EXIT_USAGE

    config = orchestrator.SynthesisConfig(
        mode=args.mode,
        split=not args.no_split,
        pruning=not args.no_pruning,
        timeout=args.timeout,
        solver_path=args.solver,
    )
    session = orchestrator.run(examples, config, oracle)

    transcript = [
        {"question": q.text, "phase": q.phase, "answer": "valid" if a else "invalid"}
        for q, a in session.transcript
    ]
    if args.output == "json":
        payload = {
            "regex": engine.emit(session.result.regex) if session.result else None,
            "conditions": [c.render() for c in session.result.conditions]
            if session.result
            else [],
            "stats": session.stats.as_dict(),
            "transcript": transcript,
            "status": session.phase,
            "best_effort": session.best_effort,
            "failure": session.failure,
        }
        print(json.dumps(payload, indent=2))
    else:
        for entry in transcript:
            print(f'[{entry["phase"]}] "{entry["question"]}" -> {entry["answer"]}')
        if session.result is not None:
            print(f"regex: {engine.emit(session.result.regex)}")
            if session.result.conditions:
                print("conditions: " + " ∧ ".join(c.render() for c in session.result.conditions))
        else:
            print(f"failed: {session.failure}")
        stats = session.stats
        print(
            f"stats: {stats.programs_enumerated} programs, {stats.questions} questions, "
            f"{stats.seconds:.2f}s ({stats.strategy})"
        )
    if session.phase == orchestrator.PHASE_FAILED:
        return EXIT_FAILED
    if session.best_effort:
        return EXIT_BEST_EFFORT
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    static_dir = args.static_dir
    if static_dir is None:
        bundled = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
        static_dir = str(bundled) if bundled.is_dir() else None
    app = create_app(static_dir=static_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _cmd_bench(args) -> int:
    from . import bench

    corpus = Path(args.corpus) if args.corpus else bench.bundled_corpus()
    try:
        cases = bench.load_corpus(corpus)
    except OSError as exc:
        print(f"regval: cannot load corpus: {exc}", file=sys.stderr)
        return EXIT_IO
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    report = bench.run_suite(
        cases, modes, timeout=args.timeout, seed=args.seed, subsample=args.subsample
    )
    print(bench.render_table(report))
    if args.csv:
        Path(args.csv).write_text(bench.to_csv(report), encoding="utf-8")
        print(f"csv written to {args.csv}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "synth":
        return _cmd_synth(args)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "bench":
        return _cmd_bench(args)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
