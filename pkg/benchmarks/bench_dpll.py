"""Compare the numba-compiled DPLL kernel with its pure-Python original.

Both variants run the same search on the same formulas, so conflict counts
must match and only wall time differs.  The first numba call compiles (or
loads from cache); it is excluded by a warm-up solve.

    python3 benchmarks/bench_dpll.py [--repeat 3] [--quick]

The package-wide switch ``CPFSAT_NUMBA=0`` forces the pure kernel everywhere;
this script selects the kernel per solver object instead so one process can
time both.
"""
from __future__ import annotations

import argparse
import itertools
import statistics
import time

from cpfsat._accel import HAS_NUMBA
from cpfsat.bench import GridSpec, generate_grid_instance
from cpfsat.cnf import Cnf
from cpfsat.driver import DriverConfig, Optimal, find_optimal
from cpfsat.encodings import EncodingKind, encode
from cpfsat.satsolver import Dpll, SolverConfig, solve
from cpfsat.satsolver.dpll import PAUSED, SAT, UNSAT


def pigeonhole(holes: int) -> Cnf:
    pigeons = holes + 1
    p = lambda i, j: i * holes + j + 1
    cnf = Cnf(pigeons * holes)
    for i in range(pigeons):
        cnf.add([p(i, j) for j in range(holes)])
    for j in range(holes):
        for i, k in itertools.combinations(range(pigeons), 2):
            cnf.add([-p(i, j), -p(k, j)])
    return cnf


def workloads(quick: bool) -> list[tuple[str, Cnf]]:
    items = [("pigeonhole-6", pigeonhole(6))]
    if not quick:
        items.append(("pigeonhole-7", pigeonhole(7)))
    grids = [GridSpec(5, 5, 6, 1), GridSpec(6, 6, 10, 2), GridSpec(8, 8, 12, 3)]
    if quick:
        grids = grids[:1]
    lib = DriverConfig(solver=SolverConfig("library"))
    for spec in grids:
        inst = generate_grid_instance(spec)
        out = find_optimal(inst, lib)
        if not isinstance(out, Optimal):
            continue
        # the last UNSAT bound and the first SAT one are the hardest queries
        for eta in (out.makespan - 1, out.makespan):
            for kind in (EncodingKind.SIMPLIFIED, EncodingKind.MATCHING):
                label = f"{spec.label}-mu{spec.agent_count}-eta{eta}-{kind.value}"
                items.append((label, encode(inst, eta, kind).cnf))
    return items


def time_solve(cnf: Cnf, use_numba: bool, repeat: int, cap: int) -> tuple[float, int, int]:
    flat, offs = cnf.csr()
    times = []
    for _ in range(repeat):
        solver = Dpll(cnf.var_count, flat, offs, use_numba=use_numba)
        t0 = time.perf_counter()
        res = solver.solve(max_conflicts=cap)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), res.status, res.conflicts


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="small workloads only")
    ap.add_argument("--max-conflicts", type=int, default=20_000,
                    help="both kernels stop after this many conflicts (status PAUSED)")
    args = ap.parse_args(argv)
    if not HAS_NUMBA:
        print("numba unavailable or disabled (CPFSAT_NUMBA=0); nothing to compare")
        return 1
    warm = pigeonhole(3)
    time_solve(warm, True, 1, args.max_conflicts)
    header = f"{'workload':44} {'vars':>7} {'clauses':>8} {'status':>7} {'conflicts':>9} " \
             f"{'numba s':>9} {'python s':>9} {'speedup':>8} {'cadical s':>9}"
    print(header)
    print("-" * len(header))
    for name, cnf in workloads(args.quick):
        t_fast, st_fast, c_fast = time_solve(cnf, True, args.repeat, args.max_conflicts)
        t_slow, st_slow, c_slow = time_solve(cnf, False, 1, args.max_conflicts)
        if (st_fast, c_fast) != (st_slow, c_slow):
            raise SystemExit(f"{name}: kernels disagree ({st_fast}/{c_fast} vs {st_slow}/{c_slow})")
        ref = solve(cnf, SolverConfig("library"))
        status = {SAT: "SAT", UNSAT: "UNSAT", PAUSED: "capped"}[st_fast]
        print(f"{name:44} {cnf.var_count:7d} {len(cnf):8d} {status:>7} {c_fast:9d} "
              f"{t_fast:9.4f} {t_slow:9.4f} {t_slow / max(t_fast, 1e-9):7.1f}x {ref.elapsed:9.4f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
