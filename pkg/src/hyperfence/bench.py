"""Benchmark harness for the observational-determinism enforcer.

One game is built and solved per copy count; repetitions share it
through fresh sessions, so the reported init time is paid once.  Each
repetition generates a seeded stream, runs it through the enforcer, and
records wall time around the enforcement loop only (parsing excluded)
plus whether the enforcer ever took over.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from . import streams
from .enforce_parallel import drive, initialize
from .gen import GenConfig, SplitMix64, gen_lines
from .logic import Alphabet, parse_hyperltl

OD_TEXT = "forall p1. forall p2. (o[p1] <-> o[p2]) W !(i[p1] <-> i[p2])"


@dataclass(frozen=True)
class BenchRow:
    """One benchmark cell: a copy count and flip probability, aggregated
    over the repetitions."""

    n: int
    flip: float
    length: int
    repetitions: int
    init_seconds: float
    avg_seconds: float
    min_seconds: float
    max_seconds: float
    enforced_runs: int


def bench_od(
    sizes: Sequence[int],
    probs: Sequence[float],
    repetitions: int,
    seed: int,
    length: int = 1000,
) -> list[BenchRow]:
    """Run the grid; sub-seeds are drawn from one seeded stream in grid
    order so the whole table is reproducible from the single seed."""
    spec = parse_hyperltl(OD_TEXT, Alphabet.make(["i"], ["o"]))
    seeder = SplitMix64(seed)
    rows: list[BenchRow] = []
    for n in sizes:
        t0 = time.perf_counter()
        shared = initialize(spec, n)
        init_seconds = time.perf_counter() - t0
        for flip in probs:
            times: list[float] = []
            enforced = 0
            for _ in range(repetitions):
                cfg = GenConfig(1, 1, n, length, flip, seeder.next_u64())
                items = list(streams.parse_stream(gen_lines(cfg), n))
                run = shared.fresh()
                t1 = time.perf_counter()
                drive(run, items)
                times.append(time.perf_counter() - t1)
                if run.interventions > 0:
                    enforced += 1
            rows.append(
                BenchRow(
                    n=n,
                    flip=flip,
                    length=length,
                    repetitions=repetitions,
                    init_seconds=init_seconds,
                    avg_seconds=sum(times) / len(times),
                    min_seconds=min(times),
                    max_seconds=max(times),
                    enforced_runs=enforced,
                )
            )
    return rows


TSV_HEADER = (
    "n\tflip\tlength\treps\tinit_s\tavg_s\tmin_s\tmax_s\tenforced\n"
)


def render_tsv(rows: Sequence[BenchRow]) -> str:
    out = [TSV_HEADER]
    for r in rows:
        out.append(
            f"{r.n}\t{r.flip:g}\t{r.length}\t{r.repetitions}\t"
            f"{r.init_seconds:.6f}\t{r.avg_seconds:.6f}\t"
            f"{r.min_seconds:.6f}\t{r.max_seconds:.6f}\t{r.enforced_runs}\n"
        )
    return "".join(out)


def _labels(rows: Sequence[BenchRow]) -> list[str]:
    return [f"n={r.n}\nflip={r.flip:g}" for r in rows]


def write_report(rows: Sequence[BenchRow], out_dir: str | Path) -> list[Path]:
    """Write the TSV table and the two figures; returns the file paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "bench.tsv", out / "bench_times.png", out / "bench_interventions.png"]
    paths[0].write_text(render_tsv(rows))

    xs = range(len(rows))
    labels = _labels(rows)

    fig, ax = plt.subplots(figsize=(1.2 + 1.1 * len(rows), 4))
    avg = [r.avg_seconds for r in rows]
    low = [r.avg_seconds - r.min_seconds for r in rows]
    high = [r.max_seconds - r.avg_seconds for r in rows]
    ax.errorbar(xs, avg, yerr=[low, high], fmt="o", capsize=4)
    ax.set_xticks(list(xs), labels)
    ax.set_ylabel("enforcement seconds per run")
    ax.set_title("Enforcement time (avg with min-max range)")
    fig.tight_layout()
    fig.savefig(paths[1])
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(1.2 + 1.1 * len(rows), 4))
    ax.bar(xs, [r.enforced_runs for r in rows])
    ax.set_xticks(list(xs), labels)
    ax.set_ylabel(f"runs with interventions (of {rows[0].repetitions if rows else 0})")
    ax.set_title("Enforced runs per configuration")
    fig.tight_layout()
    fig.savefig(paths[2])
    plt.close(fig)
    return paths
