"""Time expansion of a graph, reachability windows and path-collection checks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .model import Arrangement, CpfInstance, Graph, InputError, Solution

UNREACHABLE = np.iinfo(np.int64).max // 4


@dataclass(frozen=True)
class TimeExpansion:
    """Layered digraph with ``eta + 1`` copies of the vertex set.

    Node ``(v, l)`` has an arc to ``(v, l + 1)`` (wait) and to ``(u, l + 1)``
    for every neighbour ``u``.  Arcs are generated on demand.
    """

    base: Graph
    eta: int

    @property
    def node_count(self) -> int:
        return self.base.n * (self.eta + 1)

    @property
    def arc_count(self) -> int:
        return self.eta * (2 * self.base.m + self.base.n)

    def successors(self, v: int, l: int) -> list[tuple[int, int]]:
        if l >= self.eta:
            return []
        return [(v, l + 1)] + [(u, l + 1) for u in self.base.neighbors[v]]

    def arcs(self) -> Iterator[tuple[tuple[int, int], tuple[int, int]]]:
        for l in range(self.eta):
            for v in range(self.base.n):
                for w in self.successors(v, l):
                    yield (v, l), w

    def has_arc(self, src: tuple[int, int], dst: tuple[int, int]) -> bool:
        (u, l), (v, k) = src, dst
        if k != l + 1 or not 0 <= l < self.eta:
            return False
        return u == v or self.base.has_edge(u, v)


def expand(graph: Graph, eta: int) -> TimeExpansion:
    if eta < 0:
        raise InputError("eta must be non-negative")
    return TimeExpansion(graph, eta)


@dataclass(frozen=True)
class ReachWindow:
    """Per-agent forward/backward hop distances (``UNREACHABLE`` if none).

    Agent ``i`` can sit on ``[v, l]`` only when ``fwd[i, v] <= l`` and
    ``bwd[i, v] <= eta - l``.  In the time expansion a node ``[v, l]`` is
    reachable from ``[s, 0]`` exactly when the graph distance from ``s`` to
    ``v`` is at most ``l``: a shortest walk can be padded with wait arcs, and
    every arc advances one layer, so no shorter route exists.  The backward
    case is symmetric.
    """

    eta: int
    fwd: np.ndarray
    bwd: np.ndarray

    def allowed(self, agent: int, v: int, layer: int) -> bool:
        return bool(self.fwd[agent, v] <= layer and self.bwd[agent, v] <= self.eta - layer)

    def mask(self) -> np.ndarray:
        """Boolean array ``[layer, agent, vertex]``, True where occupancy is possible."""
        layers = np.arange(self.eta + 1)[:, None, None]
        return (self.fwd[None] <= layers) & (self.bwd[None] <= self.eta - layers)

    def excluded(self) -> Iterator[tuple[int, int, int]]:
        """(agent, vertex, layer) triples ruled out, in layer-major order."""
        ls, agents, vs = np.nonzero(~self.mask())
        for l, a, v in zip(ls.tolist(), agents.tolist(), vs.tolist()):
            yield a, v, l


def _distances(graph: Graph, source: int) -> np.ndarray:
    d = np.asarray(graph.bfs_distances(source), dtype=np.int64)
    d[d < 0] = UNREACHABLE
    return d


def reach_windows(inst: CpfInstance, eta: int) -> ReachWindow:
    mu, n = inst.agent_count, inst.n
    fwd = np.empty((mu, n), dtype=np.int64)
    bwd = np.empty((mu, n), dtype=np.int64)
    cache: dict[int, np.ndarray] = {}
    for i in range(mu):
        for arr, src in ((fwd, inst.initial.location[i]), (bwd, inst.goal.location[i])):
            if src not in cache:
                cache[src] = _distances(inst.graph, src)
            arr[i] = cache[src]
    return ReachWindow(eta, fwd, bwd)


# --- path collections ---------------------------------------------------------

Path = Sequence[tuple[int, int]]


def paths_from_solution(sol: Solution) -> list[list[tuple[int, int]]]:
    mu = sol.steps[0].agent_count
    return [[(arr.location[i], l) for l, arr in enumerate(sol.steps)] for i in range(mu)]


def solution_from_paths(paths: Sequence[Path], n: int) -> Solution:
    if not paths:
        raise InputError("need at least one path to fix the makespan")
    eta = len(paths[0]) - 1
    steps = [Arrangement(tuple(p[l][0] for p in paths), n) for l in range(eta + 1)]
    return Solution(tuple(steps))


def check_paths(paths: Sequence[Path], inst: CpfInstance, eta: int) -> bool:
    """True iff ``paths`` are non-overlapping vertex-disjoint paths joining starts to goals."""
    if len(paths) != inst.agent_count:
        raise InputError(f"expected {inst.agent_count} paths, got {len(paths)}")
    exp = expand(inst.graph, eta)
    for p in paths:
        if len(p) != eta + 1:
            raise InputError(f"path has {len(p)} nodes, expected {eta + 1}")
        if any(p[l][1] != l for l in range(eta + 1)):
            raise InputError("path nodes must be listed layer by layer")
        for a, b in zip(p, p[1:]):
            if not exp.has_arc(a, b):
                return False
    for i, p in enumerate(paths):
        if p[0][0] != inst.initial.location[i] or p[-1][0] != inst.goal.location[i]:
            return False
    seen: set[tuple[int, int]] = set()
    for p in paths:
        for node in p:
            if node in seen:
                return False
            seen.add(node)
    for l in range(eta):
        moving = [(p[l][0], p[l + 1][0]) for p in paths if p[l][0] != p[l + 1][0]]
        sources = {u for u, _ in moving}
        targets = {v for _, v in moving}
        if sources & targets:
            return False
    return True
