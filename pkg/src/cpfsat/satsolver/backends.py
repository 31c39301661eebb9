"""SAT back-ends behind one ``solve(cnf, cfg)`` call.

``embedded``  the in-tree DPLL (complete, slow on hard UNSAT queries)
``external``  any SAT-competition conformant binary, run on a DIMACS file
``library``   CaDiCaL through python-sat, in process (optional dependency)

Every SAT answer is checked against all clauses before it is returned.
"""
from __future__ import annotations

import enum
import os
import shlex
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..cnf import Cnf, SolverProtocolError, read_model, write_dimacs
from .dpll import SAT as _DPLL_SAT
from .dpll import UNSAT as _DPLL_UNSAT
from .dpll import Dpll

SOLVER_ENV = "CPFSAT_SOLVER"


class SatStatus(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    TIMEOUT = "TIMEOUT"
    SOLVER_ERROR = "SOLVER_ERROR"


@dataclass(frozen=True)
class SatResult:
    status: SatStatus
    model: np.ndarray | None = None     # bool array, index 0 unused
    diagnostic: str = ""
    elapsed: float = 0.0

    @property
    def is_sat(self) -> bool:
        return self.status is SatStatus.SAT

    def assignment(self) -> dict[int, bool]:
        if self.model is None:
            return {}
        return {v: bool(self.model[v]) for v in range(1, len(self.model))}


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "embedded"
    command: str | None = None          # template containing ``{cnf}``
    time_limit: float = 256.0
    workdir: str | None = None

    def __post_init__(self):
        if self.mode not in ("embedded", "external", "library"):
            raise ValueError(f"unknown solver mode {self.mode!r}")
        if not self.time_limit > 0:
            raise ValueError("time limit must be positive")

    def resolved_command(self) -> str:
        cmd = self.command or os.environ.get(SOLVER_ENV)
        if not cmd:
            raise ValueError(f"external mode needs a command template (or ${SOLVER_ENV})")
        if "{cnf}" not in cmd:
            raise ValueError("solver command template must contain {cnf}")
        return cmd


def _verified(cnf: Cnf, model: np.ndarray, started: float, source: str) -> SatResult:
    elapsed = time.monotonic() - started
    if not cnf.satisfied_by(model):
        return SatResult(SatStatus.SOLVER_ERROR, None, f"{source} returned a model that violates a clause", elapsed)
    return SatResult(SatStatus.SAT, model, "", elapsed)


def embedded_dpll(cnf: Cnf, time_limit: float | None = None) -> SatResult:
    started = time.monotonic()
    flat, offs = cnf.csr()
    res = Dpll(cnf.var_count, flat, offs).solve(time_limit)
    if res.status == _DPLL_SAT:
        return _verified(cnf, res.model, started, "dpll")
    if res.status == _DPLL_UNSAT:
        return SatResult(SatStatus.UNSAT, elapsed=time.monotonic() - started)
    return SatResult(SatStatus.TIMEOUT, diagnostic=f"dpll stopped after {res.conflicts} conflicts",
                     elapsed=time.monotonic() - started)


def _model_from_dict(assign: dict[int, bool], var_count: int) -> np.ndarray:
    model = np.zeros(var_count + 1, dtype=bool)
    for v, b in assign.items():
        if 1 <= v <= var_count:
            model[v] = b
    return model


def run_external(cnf: Cnf, command: str, time_limit: float, workdir: str | None = None) -> SatResult:
    started = time.monotonic()
    with tempfile.TemporaryDirectory(dir=workdir, prefix="cpfsat-") as tmp:
        path = Path(tmp) / "formula.cnf"
        with open(path, "w") as fh:
            write_dimacs(cnf, fh)
        argv = [tok.replace("{cnf}", str(path)) for tok in shlex.split(command)]
        try:
            # subprocess.run kills the child when the timeout expires
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=time_limit)
        except subprocess.TimeoutExpired:
            return SatResult(SatStatus.TIMEOUT, diagnostic=f"killed after {time_limit}s",
                             elapsed=time.monotonic() - started)
        except OSError as exc:
            return SatResult(SatStatus.SOLVER_ERROR, diagnostic=f"cannot run solver: {exc}",
                             elapsed=time.monotonic() - started)
    try:
        assign = read_model(proc.stdout, cnf.var_count)
    except SolverProtocolError as exc:
        tail = (proc.stderr or proc.stdout).strip().splitlines()[-3:]
        return SatResult(SatStatus.SOLVER_ERROR,
                         diagnostic=f"exit {proc.returncode}: {exc}; {' | '.join(tail)}",
                         elapsed=time.monotonic() - started)
    if assign is None:
        return SatResult(SatStatus.UNSAT, elapsed=time.monotonic() - started)
    return _verified(cnf, _model_from_dict(assign, cnf.var_count), started, "external solver")


def run_library(cnf: Cnf, time_limit: float | None = None) -> SatResult:
    from pysat.solvers import Cadical195

    started = time.monotonic()
    flat, offs = cnf.csr()
    if (np.diff(offs) == 0).any():
        return SatResult(SatStatus.UNSAT, elapsed=time.monotonic() - started)
    with Cadical195() as solver:
        for a, b in zip(offs[:-1].tolist(), offs[1:].tolist()):
            solver.add_clause(flat[a:b].tolist())
        timer = None
        if time_limit is not None:
            timer = threading.Timer(time_limit, solver.interrupt)
            timer.start()
        try:
            verdict = solver.solve_limited(expect_interrupt=True)
        finally:
            if timer is not None:
                timer.cancel()
        if verdict is None:
            return SatResult(SatStatus.TIMEOUT, diagnostic=f"interrupted after {time_limit}s",
                             elapsed=time.monotonic() - started)
        if not verdict:
            return SatResult(SatStatus.UNSAT, elapsed=time.monotonic() - started)
        model = np.zeros(cnf.var_count + 1, dtype=bool)
        lits = np.asarray(solver.get_model() or [], dtype=np.int64)
        lits = lits[(lits > 0) & (lits <= cnf.var_count)]
        model[lits] = True
    return _verified(cnf, model, started, "cadical")


def solve(cnf: Cnf, cfg: SolverConfig = SolverConfig()) -> SatResult:
    if cfg.mode == "embedded":
        return embedded_dpll(cnf, cfg.time_limit)
    if cfg.mode == "library":
        return run_library(cnf, cfg.time_limit)
    return run_external(cnf, cfg.resolved_command(), cfg.time_limit, cfg.workdir)
