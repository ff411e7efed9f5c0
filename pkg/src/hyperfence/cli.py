"""Command-line interface.

Subcommands:

* ``compose``            print the self-composed formula for n copies
* ``solve``              solve a parity game in PGSolver format
* ``gen``                generate a random interleaved trace stream
* ``enforce-parallel``   enforce a spec over n parallel traces
* ``enforce-sequential`` enforce a spec over sessions arriving in order
* ``bench``              run the enforcement benchmark grid

Exit codes: 0 on success, 1 when the spec is unrealizable, 2 on
input/parse problems (bad formula, bad stream, unknown proposition,
budget exceeded, unreadable file).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import streams
from .bench import bench_od, render_tsv, write_report
from .compose import DEFAULT_NODE_BUDGET, self_compose
from .enforce_parallel import run_stream
from .enforce_sequential import run_sequential, split_sessions
from .errors import (
    AlphabetError,
    BudgetExceededError,
    FormulaSyntaxError,
    StreamFormatError,
    UnrealizableError,
)
from .games import import_pgsolver, solve_graph
from .gen import GenConfig, gen_lines
from .logic import HyperSpec, format_formula, parse_spec_file


def _load_spec(path: str) -> HyperSpec:
    return parse_spec_file(Path(path).read_text())


def _read_lines(path: str | None) -> list[str]:
    if path is None:
        return sys.stdin.read().splitlines()
    return Path(path).read_text().splitlines()


def _write_lines(path: str | None, lines: Sequence[str]) -> None:
    text = "".join(line + "\n" for line in lines)
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _first_text(value: int | None) -> str:
    return "none" if value is None else str(value)


def cmd_compose(args: argparse.Namespace) -> int:
    spec = _load_spec(args.spec)
    print(format_formula(self_compose(spec, args.n, budget=args.budget)))
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    graph, labels = import_pgsolver(Path(args.game).read_text())
    w0, w1, s0, s1 = solve_graph(graph)

    def name(v: str) -> str:
        return labels.get(v) or v

    print("W0:", " ".join(sorted(name(v) for v in w0)))
    print("W1:", " ".join(sorted(name(v) for v in w1)))
    for tag, strat in (("S0", s0), ("S1", s1)):
        for v in sorted(strat, key=name):
            print(f"{tag}: {name(v)} -> {name(strat[v])}")
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    cfg = GenConfig(
        inputs=args.inputs,
        outputs=args.outputs,
        n=args.n,
        length=args.len,
        flip=args.flip,
        seed=args.seed,
        mode=args.mode,
    )
    _write_lines(args.out, gen_lines(cfg))
    return 0


def cmd_enforce_parallel(args: argparse.Namespace) -> int:
    spec = _load_spec(args.spec)
    lines = _read_lines(args.traces)
    _traces, echoed, stats = run_stream(
        spec, args.n, lines, hand_back=args.hand_back, budget=args.budget
    )
    _write_lines(args.out, echoed)
    report = [
        f"steps={stats.steps}",
        f"interventions={stats.interventions}",
        f"first_intervention={_first_text(stats.first_intervention)}",
        f"init_s={stats.init_seconds:.6f}",
        f"enforce_s={stats.enforce_seconds:.6f}",
    ]
    if args.stats is None:
        print("\n".join(report), file=sys.stderr)
    else:
        _write_lines(args.stats, report)
    return 0


def cmd_enforce_sequential(args: argparse.Namespace) -> int:
    spec = _load_spec(args.spec)
    chunks = split_sessions(_read_lines(args.traces))
    _outcomes, echoed, reports = run_sequential(
        spec, chunks, hand_back=args.hand_back, budget=args.budget
    )
    _write_lines(args.out, echoed)
    report_lines = []
    failed = False
    for r in reports:
        if r.error is not None:
            failed = True
            report_lines.append(
                f"session={r.index} init_s={r.init_seconds:.6f} error=unrealizable"
            )
        else:
            report_lines.append(
                f"session={r.index} init_s={r.init_seconds:.6f} "
                f"steps={r.steps} interventions={r.interventions} "
                f"first_intervention={_first_text(r.first_intervention)} "
                f"enforce_s={r.enforce_seconds:.6f}"
            )
    if args.stats is None:
        print("\n".join(report_lines), file=sys.stderr)
    else:
        _write_lines(args.stats, report_lines)
    return 1 if failed else 0


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def cmd_bench(args: argparse.Namespace) -> int:
    rows = bench_od(
        sizes=_int_list(args.n),
        probs=_float_list(args.flip),
        repetitions=args.reps,
        seed=args.seed,
        length=args.len,
    )
    sys.stdout.write(render_tsv(rows))
    for path in write_report(rows, args.out):
        print(f"wrote {path}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperfence",
        description="Runtime enforcement for universal hyperproperties.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_budget(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--budget",
            type=int,
            default=DEFAULT_NODE_BUDGET,
            help="node budget for the self-composition",
        )

    p = sub.add_parser("compose", help="print the self-composed formula")
    p.add_argument("--spec", required=True, help="spec file")
    p.add_argument("--n", type=int, required=True, help="number of trace copies")
    add_budget(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("solve", help="solve a PGSolver-format parity game")
    p.add_argument("game", help="game file in PGSolver format")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate a random trace stream")
    p.add_argument("--inputs", type=int, default=1, help="input propositions per trace")
    p.add_argument("--outputs", type=int, default=1, help="output propositions per trace")
    p.add_argument("--n", type=int, default=2, help="number of parallel traces")
    p.add_argument("--len", type=int, default=100, help="steps per trace")
    p.add_argument("--flip", type=float, default=0.01, help="per-bit flip probability")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--mode", choices=["random", "symmetric"], default="random")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("enforce-parallel", help="enforce over parallel traces")
    p.add_argument("--spec", required=True, help="spec file")
    p.add_argument("--n", type=int, required=True, help="number of parallel traces")
    p.add_argument("--traces", help="stream file (default: stdin)")
    p.add_argument("--out", help="echoed stream file (default: stdout)")
    p.add_argument("--stats", help="stats file (default: stderr)")
    p.add_argument(
        "--hand-back",
        action="store_true",
        help="return control to the system after a correction",
    )
    add_budget(p)
    p.set_defaults(func=cmd_enforce_parallel)

    p = sub.add_parser("enforce-sequential", help="enforce sessions in order")
    p.add_argument("--spec", required=True, help="spec file")
    p.add_argument("--traces", help="stream file with session sentinels (default: stdin)")
    p.add_argument("--out", help="echoed stream file (default: stdout)")
    p.add_argument("--stats", help="stats file (default: stderr)")
    p.add_argument(
        "--hand-back",
        action="store_true",
        help="return control to the system after a correction",
    )
    add_budget(p)
    p.set_defaults(func=cmd_enforce_sequential)

    p = sub.add_parser("bench", help="benchmark the enforcer and plot results")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n", default="2,3", help="comma-separated copy counts")
    p.add_argument("--flip", default="0.005,0.01", help="comma-separated flip probabilities")
    p.add_argument("--reps", type=int, default=20, help="repetitions per cell")
    p.add_argument("--len", type=int, default=1000, help="steps per run")
    p.add_argument("--seed", type=int, default=0, help="benchmark seed")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnrealizableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        StreamFormatError,
        FormulaSyntaxError,
        AlphabetError,
        BudgetExceededError,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
