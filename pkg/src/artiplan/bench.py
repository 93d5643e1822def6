"""Random instance generation and PAR10/coverage benchmarking."""

from __future__ import annotations

import csv
import io
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Callable, Iterable, Sequence

from .domain import Scenario, State, Topology
from .instance_io import Instance, make_instance
from .planner import Outcome, solve

Clock = Callable[[], float]


@dataclass(frozen=True)
class BenchConfig:
    links: tuple[int, ...] = tuple(range(4, 13))
    orientations: tuple[int, ...] = (4, 6, 8, 12)
    per_cell: int = 5
    time_limit: float = 300.0
    encodings: tuple[str, ...] = ("sas", "saes", "maes")
    seed: int = 0
    workers: int = 1
    reject_trivial: bool = False
    max_horizon: int = 64

    def __post_init__(self) -> None:
        if self.per_cell < 1:
            raise ValueError("per_cell must be positive")
        if self.time_limit < 0:
            raise ValueError("time_limit must be non-negative")
        for k in self.orientations:
            if k < 1 or 360 % k:
                raise ValueError(f"{k} orientations do not divide 360")
        for n in self.links:
            if n < 2:
                raise ValueError("instances need at least two links")
        for e in self.encodings:
            Scenario(e)
        if self.workers < 1:
            raise ValueError("workers must be positive")


def par10(elapsed: float | None, limit: float) -> float:
    """Penalised runtime: ``elapsed`` when solved within ``limit``, else ``10 * limit``."""
    if elapsed is None:
        return 10.0 * limit
    if elapsed < 0:
        raise ValueError("elapsed time cannot be negative")
    if elapsed > limit:
        raise ValueError(f"elapsed {elapsed} exceeds the limit {limit}")
    return float(elapsed)


def _draw_pairs(seed, links: int, orientations: int, count: int, reject_trivial: bool):
    rng = random.Random(f"{seed}-{links}-{orientations}")
    granularity = 360 // orientations
    grid = [i * granularity for i in range(orientations)]
    space = orientations ** (2 * links) - (orientations**links if reject_trivial else 0)
    if count > space:
        raise ValueError(f"cannot draw {count} distinct instances from {space}")
    seen: set = set()
    pairs = []
    while len(pairs) < count:
        start = tuple(rng.choice(grid) for _ in range(links))
        goal = tuple(rng.choice(grid) for _ in range(links))
        if reject_trivial and start == goal:
            continue
        if (start, goal) in seen:
            continue
        seen.add((start, goal))
        pairs.append((start, goal))
    return pairs


def instance_from_angles(
    start: Sequence[int], goal: Sequence[int], orientations: int, scenario: Scenario | str
) -> Instance:
    scenario = Scenario(scenario)
    n = len(start)
    topology = Topology.chain(scenario, n, 360 // orientations)
    if scenario is Scenario.SAS:
        state = State(tuple(start))
    else:
        state = State(tuple(start), free=frozenset(topology.grippers))
    return make_instance(topology, state, dict(enumerate(goal, start=1)))


def gen_instances(
    seed,
    links: int,
    orientations: int,
    count: int,
    scenario: Scenario | str = Scenario.SAS,
    reject_trivial: bool = False,
) -> list[Instance]:
    """Seeded instances with uniform grid-aligned initial and goal angles.

    For a fixed seed, the SAS and extended variants share their angles.
    """
    if links < 2:
        raise ValueError("instances need at least two links")
    if orientations < 1 or 360 % orientations:
        raise ValueError(f"{orientations} orientations do not divide 360")
    return [
        instance_from_angles(s, g, orientations, scenario)
        for s, g in _draw_pairs(seed, links, orientations, count, reject_trivial)
    ]


@dataclass(frozen=True)
class RunRecord:
    links: int
    orientations: int
    index: int
    encoding: str
    outcome: str
    elapsed: float | None
    plan_length: int | None
    par10: float


@dataclass(frozen=True)
class CellResult:
    links: int
    orientations: int
    encoding: str
    total: int
    solved: int
    coverage: float
    par10: float


def aggregate(records: Iterable[RunRecord]) -> list[CellResult]:
    groups: dict[tuple, list[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.links, r.orientations, r.encoding), []).append(r)
    cells = []
    for (n, k, enc), rs in sorted(groups.items()):
        solved = sum(r.outcome == Outcome.PLAN.value for r in rs)
        cells.append(
            CellResult(n, k, enc, len(rs), solved, 100.0 * solved / len(rs), fmean(r.par10 for r in rs))
        )
    return cells


@dataclass
class BenchReport:
    config: BenchConfig
    records: list[RunRecord] = field(default_factory=list)

    @property
    def cells(self) -> list[CellResult]:
        return aggregate(self.records)

    def cell(self, links: int, orientations: int, encoding: str) -> CellResult:
        for c in self.cells:
            if (c.links, c.orientations, c.encoding) == (links, orientations, encoding):
                return c
        raise KeyError((links, orientations, encoding))

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "cells": [asdict(c) for c in self.cells],
            "records": [asdict(r) for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        fields = list(RunRecord.__dataclass_fields__)
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in self.records:
            writer.writerow(asdict(r))
        return buf.getvalue()

    def to_table(self) -> str:
        """Text table: one block per orientation count, rows per link count,
        PAR10 columns then coverage columns per encoding."""
        encs = list(self.config.encodings)
        by_key = {(c.links, c.orientations, c.encoding): c for c in self.cells}
        width = 9
        lines = []
        for k in self.config.orientations:
            lines.append(f"Number of allowed orientations: {k}")
            lines.append(
                " " * 6
                + "PAR10".center(width * len(encs))
                + " | "
                + "Coverage".center(width * len(encs))
            )
            names = "".join(e.upper().rjust(width) for e in encs)
            lines.append("links" + " " + names + " | " + names)
            for n in self.config.links:
                p_cols, c_cols = [], []
                for e in encs:
                    c = by_key.get((n, k, e))
                    if c is None:
                        p_cols.append("n/a".rjust(width))
                        c_cols.append("n/a".rjust(width))
                        continue
                    p_cols.append(f"{c.par10:.2f}".rjust(width))
                    c_cols.append(("--" if c.solved == 0 else f"{c.coverage:.1f}").rjust(width))
                lines.append(f"{n:>5} " + "".join(p_cols) + " | " + "".join(c_cols))
            lines.append("")
        return "\n".join(lines)

    def write_figures(self, directory: str | Path) -> list[Path]:
        """Coverage and PAR10 against link count, one figure per metric,
        one line per (encoding, orientations)."""
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        cells = self.cells
        written = []
        for metric, label in (("coverage", "coverage (%)"), ("par10", "PAR10 (s)")):
            fig, ax = plt.subplots(figsize=(6, 4))
            for enc in self.config.encodings:
                for k in self.config.orientations:
                    pts = sorted(
                        (c.links, getattr(c, metric))
                        for c in cells
                        if c.encoding == enc and c.orientations == k
                    )
                    if pts:
                        xs, ys = zip(*pts)
                        ax.plot(xs, ys, marker="o", label=f"{enc.upper()} / {k}")
            ax.set_xlabel("links")
            ax.set_ylabel(label)
            if metric == "par10":
                ax.set_yscale("symlog", linthresh=0.01)
            ax.grid(True, alpha=0.3)
            ax.legend(fontsize="small", ncol=2)
            fig.tight_layout()
            path = directory / f"{metric}.png"
            fig.savefig(path, dpi=120, metadata={"Software": None})
            plt.close(fig)
            written.append(path)
        return written


def _run_one(job, limit: float, max_horizon: int, clock: Clock) -> RunRecord:
    n, k, index, enc, start, goal = job
    scenario = Scenario.SAS if enc == "sas" else Scenario.SAES
    instance = instance_from_angles(start, goal, k, scenario)
    result = solve(instance, enc, max_horizon=max_horizon, time_budget=limit, clock=clock)
    elapsed = result.stats.elapsed
    if result.outcome is Outcome.PLAN and elapsed <= limit:
        return RunRecord(n, k, index, enc, Outcome.PLAN.value, elapsed, len(result.plan), elapsed)
    outcome = Outcome.TIMEOUT if result.outcome is not Outcome.UNSAT else Outcome.UNSAT
    return RunRecord(n, k, index, enc, outcome.value, None, None, par10(None, limit))


def _run_default_clock(job, limit, max_horizon):
    return _run_one(job, limit, max_horizon, time.perf_counter)


def jobs_for(config: BenchConfig) -> list[tuple]:
    jobs = []
    for k in config.orientations:
        for n in config.links:
            pairs = _draw_pairs(config.seed, n, k, config.per_cell, config.reject_trivial)
            for i, (start, goal) in enumerate(pairs):
                for enc in config.encodings:
                    jobs.append((n, k, i, Scenario(enc).value, start, goal))
    return jobs


def run_bench(
    config: BenchConfig,
    clock: Clock | None = None,
    progress: Callable[[RunRecord], None] | None = None,
) -> BenchReport:
    """Solve every generated instance with every encoding under the limit.

    A custom ``clock`` forces sequential execution so runs stay reproducible.
    """
    jobs = jobs_for(config)
    records: list[RunRecord] = []
    if config.workers > 1 and clock is None:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(_run_default_clock, job, config.time_limit, config.max_horizon)
                for job in jobs
            ]
            for fut in futures:
                rec = fut.result()
                records.append(rec)
                if progress:
                    progress(rec)
    else:
        for job in jobs:
            rec = _run_one(job, config.time_limit, config.max_horizon, clock or time.perf_counter)
            records.append(rec)
            if progress:
                progress(rec)
    records.sort(key=lambda r: (r.orientations, r.links, r.index, r.encoding))
    return BenchReport(config, records)
