"""Optimal makespan by the sequential increasing strategy.

Makespan bounds ``eta = eta_start, eta_start + 1, ...`` are tried in turn; the
first satisfiable formula gives the optimum, provided every smaller bound was
shown unsatisfiable.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Union

from .cnf import TriviallyUnsat
from .encodings import EncodingKind, decode, encode
from .model import CpfInstance, Solution, solution_error
from .satsolver import SatStatus, SolverConfig, solve

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Optimal:
    makespan: int
    solution: Solution
    unsat_below: bool


@dataclass(frozen=True)
class Unsolvable:
    reason: str


@dataclass(frozen=True)
class Unknown:
    eta: int
    reason: str


SolveOutcome = Union[Optimal, Unsolvable, Unknown]


@dataclass(frozen=True)
class QueryRecord:
    eta: int
    status: SatStatus
    variables: int
    clauses: int
    seconds: float


@dataclass
class DriverConfig:
    encoding: EncodingKind = EncodingKind.SIMPLIFIED
    use_distance_heuristic: bool = True
    eta_start: int = 1
    eta_cap: int | None = None          # None: n * mu + n
    budget: float = 256.0
    solver: SolverConfig = field(default_factory=SolverConfig)

    def cap_for(self, inst: CpfInstance) -> int:
        cap = self.eta_cap if self.eta_cap is not None else inst.n * inst.agent_count + inst.n
        if not 1 <= self.eta_start <= cap:
            raise ValueError(f"need 1 <= eta_start ({self.eta_start}) <= eta_cap ({cap})")
        return cap


def precheck(inst: CpfInstance) -> Unsolvable | None:
    """Cheap necessary conditions; None means the search should proceed."""
    comp = inst.graph.components()
    start, goal = inst.initial.location, inst.goal.location
    for a, (s, g) in enumerate(zip(start, goal)):
        if comp[s] != comp[g]:
            return Unsolvable(f"agent {a + 1} cannot reach its goal: different components")
    if start != goal and inst.agent_count == inst.n:
        return Unsolvable("no vacant vertex, so no agent can ever move")
    # per-component agent counts agree by the check above, but a full component
    # blocks all motion inside it
    sizes: dict[int, int] = {}
    for c in comp:
        sizes[c] = sizes.get(c, 0) + 1
    load: dict[int, int] = {}
    for s in start:
        load[comp[s]] = load.get(comp[s], 0) + 1
    for a, (s, g) in enumerate(zip(start, goal)):
        if s != g and load[comp[s]] == sizes[comp[s]]:
            return Unsolvable(f"agent {a + 1} sits in a fully occupied component")
    return None


def find_optimal(inst: CpfInstance, cfg: DriverConfig | None = None,
                 trace: list[QueryRecord] | None = None) -> SolveOutcome:
    cfg = cfg or DriverConfig()
    if inst.initial == inst.goal:
        return Optimal(0, Solution((inst.initial,)), True)
    verdict = precheck(inst)
    if verdict is not None:
        return verdict
    cap = cfg.cap_for(inst)
    deadline = time.monotonic() + cfg.budget
    for eta in range(cfg.eta_start, cap + 1):
        left = deadline - time.monotonic()
        if left <= 0:
            return Unknown(eta, f"time budget of {cfg.budget}s exhausted")
        t0 = time.monotonic()
        try:
            enc = encode(inst, eta, cfg.encoding, heuristic=cfg.use_distance_heuristic)
        except TriviallyUnsat:
            res_status, res = SatStatus.UNSAT, None
        else:
            solver_cfg = SolverConfig(cfg.solver.mode, cfg.solver.command, min(cfg.solver.time_limit, left),
                                      cfg.solver.workdir)
            res = solve(enc.cnf, solver_cfg)
            res_status = res.status
        if trace is not None:
            nv, nc = (enc.cnf.var_count, len(enc.cnf)) if res is not None else (0, 0)
            trace.append(QueryRecord(eta, res_status, nv, nc, time.monotonic() - t0))
        log.debug("eta=%d %s", eta, res_status.value)
        if res_status is SatStatus.SAT:
            sol = decode(enc, res.model)
            err = solution_error(sol, inst)
            if err is not None:
                return Unknown(eta, f"decoded plan is invalid: {err}")
            # eta - 1 is certified when it was queried, or when it is 0 (start != goal)
            return Optimal(eta, sol, eta > cfg.eta_start or eta == 1)
        if res_status is SatStatus.TIMEOUT:
            return Unknown(eta, res.diagnostic or "solver timed out")
        if res_status is SatStatus.SOLVER_ERROR:
            return Unknown(eta, f"solver error: {res.diagnostic}")
    return Unknown(cap, f"makespan cap {cap} reached")
