"""Brute-force optimal makespan by breadth-first search over joint states.

Independent of the encoders: it works directly on agent placements and the
transition rules, so it serves as ground truth for small instances.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .model import Arrangement, CpfInstance, Graph, Solution

JointState = tuple[int, ...]


class StateBudgetExceeded(RuntimeError):
    """The search visited more joint states than allowed."""


@dataclass(frozen=True)
class OracleResult:
    makespan: int | None          # None: not reachable within the cap
    explored: int
    solution: Solution | None = None

    @property
    def solvable(self) -> bool:
        return self.makespan is not None


def successors(state: JointState, graph: Graph) -> Iterator[JointState]:
    """All states reachable in one step, including the unchanged one.

    Agents are processed in index order; a move is allowed only into a vertex
    that is vacant before the step and not already claimed in this step.
    """
    before = set(state)
    mu = len(state)
    out: list[int] = []
    claimed: set[int] = set()

    def rec(i: int):
        if i == mu:
            yield tuple(out)
            return
        v = state[i]
        options = [v] + [u for u in graph.neighbors[v] if u not in before]
        for u in options:
            if u in claimed:
                continue
            claimed.add(u)
            out.append(u)
            yield from rec(i + 1)
            out.pop()
            claimed.discard(u)

    yield from rec(0)


def oracle_search(inst: CpfInstance, cap: int, state_budget: int = 2_000_000) -> OracleResult:
    start, goal = inst.initial.location, inst.goal.location
    parent: dict[JointState, JointState | None] = {start: None}
    frontier = [start]
    depth = 0
    while True:
        if goal in parent:
            return OracleResult(depth, len(parent), _trace(parent, goal, inst.n))
        if depth >= cap or not frontier:
            return OracleResult(None, len(parent))
        nxt = []
        for s in frontier:
            for t in successors(s, inst.graph):
                if t not in parent:
                    parent[t] = s
                    nxt.append(t)
                    if len(parent) > state_budget:
                        raise StateBudgetExceeded(f"more than {state_budget} joint states")
        frontier = nxt
        depth += 1


def _trace(parent: dict, goal: JointState, n: int) -> Solution:
    chain = [goal]
    while parent[chain[-1]] is not None:
        chain.append(parent[chain[-1]])
    return Solution(tuple(Arrangement(s, n) for s in reversed(chain)))


def oracle_makespan(inst: CpfInstance, cap: int, state_budget: int = 2_000_000) -> int | None:
    """Optimal makespan, or None when the goal is not reached within ``cap`` steps."""
    return oracle_search(inst, cap, state_budget).makespan


def oracle_decision(inst: CpfInstance, eta: int, state_budget: int = 2_000_000) -> bool:
    """True iff a plan of makespan at most ``eta`` exists."""
    return oracle_makespan(inst, eta, state_budget) is not None
