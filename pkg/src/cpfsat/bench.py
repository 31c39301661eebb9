"""Grid instance generator and the size / runtime studies.

Instances live on 4-connected grids with a share of cells removed as
obstacles.  Randomness comes from ``random.Random`` (Mersenne Twister with a
documented integer sampling algorithm), so a seed fixes an instance on every
platform.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import random
import statistics
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .driver import DriverConfig, Optimal, Unknown, find_optimal, precheck
from .encodings import EncodingKind, encode
from .model import CpfInstance, InputError, metrics, write_instance
from .oracle import StateBudgetExceeded, oracle_decision

log = logging.getLogger(__name__)

# --- generation ----------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    width: int
    height: int
    agent_count: int
    rng_seed: int = 0
    obstacle_fraction: float = 0.20

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InputError("grid sides must be positive")
        if not 0 <= self.obstacle_fraction < 1:
            raise InputError("obstacle fraction must lie in [0, 1)")
        if self.agent_count < 0 or self.agent_count > self.free_cells:
            raise InputError(f"{self.agent_count} agents do not fit on {self.free_cells} free cells")

    @property
    def cells(self) -> int:
        return self.width * self.height

    @property
    def obstacle_count(self) -> int:
        return math.floor(self.obstacle_fraction * self.cells)

    @property
    def free_cells(self) -> int:
        return self.cells - self.obstacle_count

    @property
    def label(self) -> str:
        return f"{self.width}x{self.height}"


def grid_graph(width: int, height: int, obstacles: Iterable[int] = ()) -> tuple[int, list[tuple[int, int]]]:
    """Vertices are the surviving cells in row-major order."""
    blocked = set(obstacles)
    index: dict[int, int] = {}
    for cell in range(width * height):
        if cell not in blocked:
            index[cell] = len(index)
    edges = []
    for cell, v in index.items():
        x, y = cell % width, cell // width
        if x + 1 < width and cell + 1 in index:
            edges.append((v, index[cell + 1]))
        if y + 1 < height and cell + width in index:
            edges.append((v, index[cell + width]))
    return len(index), edges


def _place(rng: random.Random, n: int, count: int) -> list[int]:
    free = list(range(n))
    placed = []
    for _ in range(count):
        v = rng.choice(free)
        free.remove(v)
        placed.append(v)
    return placed


def generate_grid_instance(spec: GridSpec) -> CpfInstance:
    rng = random.Random(spec.rng_seed)
    obstacles = rng.sample(range(spec.cells), spec.obstacle_count)
    n, edges = grid_graph(spec.width, spec.height, obstacles)
    starts = _place(rng, n, spec.agent_count)
    goals = _place(rng, n, spec.agent_count)
    return CpfInstance.build(n, edges, starts, goals)


def filter_solvable(inst: CpfInstance, *, oracle_states: int = 200_000,
                    driver: DriverConfig | None = None) -> bool:
    """Precheck, then the BFS oracle when the joint space is small, else the driver."""
    if precheck(inst) is not None:
        return False
    if inst.initial == inst.goal:
        return True
    cap = inst.n * inst.agent_count + inst.n
    if inst.n ** inst.agent_count <= oracle_states:
        try:
            return oracle_decision(inst, cap, state_budget=oracle_states)
        except StateBudgetExceeded:
            pass
    return isinstance(find_optimal(inst, driver or DriverConfig()), Optimal)


def solvable_instances(spec: GridSpec, count: int, **filter_kw) -> list[tuple[int, CpfInstance]]:
    """``count`` accepted instances; a rejected seed is replaced by the next one."""
    out = []
    seed = spec.rng_seed
    while len(out) < count:
        inst = generate_grid_instance(replace(spec, rng_seed=seed))
        if filter_solvable(inst, **filter_kw):
            out.append((seed, inst))
        seed += 1
    return out


def write_suite(specs: Sequence[GridSpec], root: str | Path) -> list[Path]:
    """Write instances as ``root/WxH/muM/seedS.cpf``."""
    paths = []
    for spec in specs:
        path = Path(root) / spec.label / f"mu{spec.agent_count}" / f"seed{spec.rng_seed}.cpf"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(write_instance(generate_grid_instance(spec)))
        paths.append(path)
    return paths


# --- reports --------------------------------------------------------------------

SIZE_FIELDS = ["grid", "eta", "mu", "seed", "encoding", "variables", "clauses", "literals"]
SIZE_AGG_FIELDS = ["grid", "eta", "mu", "encoding", "instances", "#Variables", "#Clauses", "Ratio", "Length"]
RUN_FIELDS = ["grid", "mu", "seed", "encoding", "status", "seconds", "makespan", "total_moves"]
RUN_AGG_FIELDS = ["grid", "mu", "encoding", "instances", "solved", "censored", "mean_seconds",
                  "median_seconds", "mean_makespan", "mean_total_moves"]


@dataclass
class BenchReport:
    kind: str                                   # "size" or "runtime"
    rows: list[dict] = field(default_factory=list)
    aggregates: list[dict] = field(default_factory=list)

    def recompute(self) -> list[dict]:
        return aggregate_size(self.rows) if self.kind == "size" else aggregate_runtime(self.rows)

    def aggregate_rows(self) -> "BenchReport":
        self.aggregates = self.recompute()
        return self

    def to_csv(self, aggregates: bool = False) -> str:
        if self.kind == "size":
            fields = SIZE_AGG_FIELDS if aggregates else SIZE_FIELDS
        else:
            fields = RUN_AGG_FIELDS if aggregates else RUN_FIELDS
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in (self.aggregates if aggregates else self.rows):
            writer.writerow(row)
        return buf.getvalue()


def _group(rows: list[dict], keys: Sequence[str]) -> dict[tuple, list[dict]]:
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(tuple(row[k] for k in keys), []).append(row)
    return groups


def aggregate_size(rows: list[dict]) -> list[dict]:
    """Means per cell; ratio and clause length are taken over the cell totals."""
    out = []
    for key, group in _group(rows, ["grid", "eta", "mu", "encoding"]).items():
        k = len(group)
        var = sum(r["variables"] for r in group)
        cl = sum(r["clauses"] for r in group)
        lit = sum(r["literals"] for r in group)
        out.append(dict(zip(["grid", "eta", "mu", "encoding"], key), instances=k,
                        **{"#Variables": var / k, "#Clauses": cl / k,
                           "Ratio": cl / var if var else 0.0, "Length": lit / cl if cl else 0.0}))
    return out


def aggregate_runtime(rows: list[dict]) -> list[dict]:
    out = []
    for key, group in _group(rows, ["grid", "mu", "encoding"]).items():
        solved = [r for r in group if r["status"] == "optimal"]
        secs = [r["seconds"] for r in solved]
        out.append(dict(
            zip(["grid", "mu", "encoding"], key), instances=len(group), solved=len(solved),
            censored=len(solved) < len(group),
            mean_seconds=statistics.fmean(secs) if secs else None,
            median_seconds=statistics.median(secs) if secs else None,
            mean_makespan=statistics.fmean(r["makespan"] for r in solved) if solved else None,
            mean_total_moves=statistics.fmean(r["total_moves"] for r in solved) if solved else None,
        ))
    return out


# --- studies ----------------------------------------------------------------------


def size_study(grids: Sequence[GridSpec], encodings: Sequence[EncodingKind], eta_per_grid: dict[str, int],
               *, seeds: int = 10, heuristic: bool = True) -> BenchReport:
    """Encode (without solving) ``seeds`` instances per grid spec and encoding."""
    report = BenchReport("size")
    for spec in grids:
        eta = eta_per_grid[spec.label]
        for seed in range(spec.rng_seed, spec.rng_seed + seeds):
            inst = generate_grid_instance(replace(spec, rng_seed=seed))
            for kind in encodings:
                stats = encode(inst, eta, kind, heuristic=heuristic, counting=True).stats
                report.rows.append(dict(grid=spec.label, eta=eta, mu=spec.agent_count, seed=seed,
                                        encoding=kind.value, variables=stats.variables,
                                        clauses=stats.clauses, literals=stats.literals))
    return report.aggregate_rows()


def runtime_study(base: GridSpec, agent_counts: Sequence[int], encodings: Sequence[EncodingKind],
                  cfg: DriverConfig, *, seeds: int = 10) -> BenchReport:
    """Solve ``seeds`` solvable instances per agent count with every encoding.

    An encoding stops at the first agent count where some instance misses the
    budget; that cell is kept and marked censored.
    """
    report = BenchReport("runtime")
    active = list(encodings)
    for mu in sorted(agent_counts):
        if not active:
            break
        batch = solvable_instances(replace(base, agent_count=mu), seeds,
                                   driver=replace(cfg, encoding=EncodingKind.SIMPLIFIED))
        for kind in list(active):
            missed = False
            for seed, inst in batch:
                t0 = time.monotonic()
                out = find_optimal(inst, replace(cfg, encoding=kind))
                row = dict(grid=base.label, mu=mu, seed=seed, encoding=kind.value,
                           seconds=time.monotonic() - t0, makespan=None, total_moves=None)
                if isinstance(out, Optimal):
                    m = metrics(out.solution)
                    row.update(status="optimal", makespan=m.makespan, total_moves=m.total_moves)
                else:
                    row["status"] = "unknown" if isinstance(out, Unknown) else "unsolvable"
                    missed = True
                report.rows.append(row)
            if missed:
                log.info("%s censored at mu=%d", kind.value, mu)
                active.remove(kind)
    return report.aggregate_rows()


def move_differences(report: BenchReport, reference: str = EncodingKind.SIMPLIFIED.value) -> list[dict]:
    """Sorted per-instance total-moves differences against the reference encoding."""
    ref = {(r["grid"], r["mu"], r["seed"]): r["total_moves"] for r in report.rows
           if r["encoding"] == reference and r["status"] == "optimal"}
    out = []
    for enc, group in _group(report.rows, ["encoding"]).items():
        if enc[0] == reference:
            continue
        diffs = sorted(r["total_moves"] - ref[k] for r in group
                       if r["status"] == "optimal" and (k := (r["grid"], r["mu"], r["seed"])) in ref)
        out.extend(dict(encoding=enc[0], rank=i, difference=d) for i, d in enumerate(diffs))
    return out
