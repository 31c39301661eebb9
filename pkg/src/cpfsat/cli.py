"""Command-line entry point (``cpfsat``)."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .cnf import write_dimacs
from .driver import DriverConfig, Optimal, Unknown, find_optimal
from .encodings import EncodingKind, encode
from .model import InputError, ParseError, metrics, read_instance, read_solution, solution_error, write_instance, write_solution
from .oracle import StateBudgetExceeded, oracle_search
from .satsolver import SolverConfig

EXIT_OK, EXIT_UNSOLVABLE, EXIT_USAGE, EXIT_PARSE, EXIT_SOLVER, EXIT_UNKNOWN = 0, 1, 2, 3, 4, 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _encoding(text: str) -> EncodingKind:
    try:
        return EncodingKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text: str) -> tuple[int, int]:
    try:
        w, h = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError("grid must look like WxH") from None
    return w, h


def _load(path: str):
    return read_instance(Path(path).read_text())


def _solver_cfg(args) -> SolverConfig:
    mode = args.backend
    if args.solver and mode == "embedded":
        mode = "external"
    return SolverConfig(mode=mode, command=args.solver, time_limit=args.timeout)


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    cfg = DriverConfig(encoding=args.encoding, use_distance_heuristic=not args.no_heuristic,
                       eta_cap=args.eta_cap, budget=args.timeout, solver=_solver_cfg(args))
    out = find_optimal(inst, cfg)
    if isinstance(out, Optimal):
        err = solution_error(out.solution, inst)
        if err is not None:
            print(f"internal error: solution failed validation: {err}", file=sys.stderr)
            return EXIT_SOLVER
        m = metrics(out.solution)
        print(f"optimal makespan {out.makespan} total_moves {m.total_moves} "
              f"certified {'yes' if out.unsat_below else 'no'}")
        text = write_solution(out.solution)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if isinstance(out, Unknown):
        print(f"unknown at eta {out.eta}: {out.reason}")
        return EXIT_SOLVER if out.reason.startswith("solver error") else EXIT_UNKNOWN
    print(f"unsolvable: {out.reason}")
    return EXIT_UNSOLVABLE


def cmd_encode(args) -> int:
    inst = _load(args.instance)
    enc = encode(inst, args.eta, args.encoding, heuristic=not args.no_heuristic)
    with open(args.out, "w") as fh:
        write_dimacs(enc.cnf, fh)
    if args.varmap:
        Path(args.varmap).write_text(enc.varmap.dumps())
    s = enc.stats
    print(f"variables {s.variables} clauses {s.clauses} mean_length {s.mean_length:.3f}")
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = _load(args.instance)
    sol = read_solution(Path(args.solution).read_text(), inst.n)
    err = solution_error(sol, inst)
    if err is not None:
        print(f"invalid: {err}")
        return EXIT_UNSOLVABLE
    m = metrics(sol)
    print(f"valid makespan {m.makespan} total_moves {m.total_moves}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    cap = args.cap if args.cap is not None else inst.n * inst.agent_count + inst.n
    try:
        res = oracle_search(inst, cap, args.states)
    except StateBudgetExceeded as exc:
        print(f"state budget exceeded: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    if res.makespan is None:
        print(f"no plan within {cap} steps ({res.explored} states)")
        return EXIT_UNSOLVABLE
    print(f"optimal makespan {res.makespan} ({res.explored} states)")
    return EXIT_OK


def cmd_gen(args) -> int:
    w, h = args.grid
    spec = bench.GridSpec(w, h, args.agents, args.seed, args.obstacles)
    text = write_instance(bench.generate_grid_instance(spec))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _emit(report: bench.BenchReport, args):
    Path(args.out).write_text(report.to_csv()) if args.out else sys.stdout.write(report.to_csv())
    if args.summary:
        Path(args.summary).write_text(report.to_csv(aggregates=True))


def cmd_bench_size(args) -> int:
    w, h = args.grid
    grids = [bench.GridSpec(w, h, mu, args.seed, args.obstacles) for mu in args.agents]
    report = bench.size_study(grids, args.encodings, {grids[0].label: args.eta}, seeds=args.seeds,
                              heuristic=not args.no_heuristic)
    _emit(report, args)
    return EXIT_OK


def cmd_bench_runtime(args) -> int:
    w, h = args.grid
    base = bench.GridSpec(w, h, 0, args.seed, args.obstacles)
    cfg = DriverConfig(use_distance_heuristic=not args.no_heuristic, budget=args.timeout,
                       solver=_solver_cfg(args))
    report = bench.runtime_study(base, args.agents, args.encodings, cfg, seeds=args.seeds)
    _emit(report, args)
    return EXIT_OK


def _add_solver_flags(p):
    p.add_argument("--solver", help="external solver command template with {cnf} (or $CPFSAT_SOLVER)")
    p.add_argument("--backend", choices=["embedded", "external", "library"], default="embedded")
    p.add_argument("--timeout", type=float, default=256.0, help="seconds per instance")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cpfsat", description="Makespan-optimal cooperative path finding via SAT.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="find an optimal plan")
    s.add_argument("--instance", required=True)
    s.add_argument("--encoding", type=_encoding, default=EncodingKind.SIMPLIFIED)
    s.add_argument("--no-heuristic", action="store_true")
    s.add_argument("--eta-cap", type=int)
    s.add_argument("--out", help="solution file (default: stdout)")
    _add_solver_flags(s)
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("encode", help="write the CNF for one makespan bound")
    e.add_argument("--instance", required=True)
    e.add_argument("--encoding", type=_encoding, default=EncodingKind.SIMPLIFIED)
    e.add_argument("--eta", type=int, required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--varmap")
    e.add_argument("--no-heuristic", action="store_true")
    e.set_defaults(func=cmd_encode)

    v = sub.add_parser("validate", help="check a plan against an instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--solution", required=True)
    v.set_defaults(func=cmd_validate)

    o = sub.add_parser("oracle", help="optimal makespan by brute-force search")
    o.add_argument("--instance", required=True)
    o.add_argument("--cap", type=int)
    o.add_argument("--states", type=int, default=2_000_000)
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen", help="generate a random grid instance")
    g.add_argument("--grid", type=_grid, required=True)
    g.add_argument("--obstacles", type=float, default=0.2)
    g.add_argument("--agents", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    reports = (("bench-size", cmd_bench_size, "formula sizes over random grid instances (CSV)"),
               ("bench-runtime", cmd_bench_runtime, "solve times over random grid instances (CSV)"))
    for name, func, text in reports:
        b = sub.add_parser(name, help=text)
        b.add_argument("--grid", type=_grid, required=True)
        b.add_argument("--obstacles", type=float, default=0.2)
        b.add_argument("--agents", type=int, nargs="+", required=True)
        b.add_argument("--encodings", type=_encoding, nargs="+", default=list(EncodingKind))
        b.add_argument("--seeds", type=int, default=10)
        b.add_argument("--seed", type=int, default=0)
        b.add_argument("--no-heuristic", action="store_true")
        b.add_argument("--out")
        b.add_argument("--summary", help="also write per-cell aggregates here")
        if name == "bench-size":
            b.add_argument("--eta", type=int, required=True)
        else:
            _add_solver_flags(b)
        b.set_defaults(func=func)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
