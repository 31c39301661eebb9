"""CPF instances, solutions, validity checks and the plain-text file formats.

Vertices and agents are 0-based everywhere inside the package.  The text
formats use 1-based ids, which is what people write by hand.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class InputError(ValueError):
    """Structurally inconsistent arguments (wrong agent sets, bad lengths)."""


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    Neighbours of every vertex are kept in ascending index order; that order
    is the neighbour numbering used by the INVERSE encoding.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    neighbors: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _rank: tuple[dict[int, int], ...] = field(init=False, repr=False, compare=False)

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 1:
            raise InputError("graph needs at least one vertex")
        canon = set()
        for u, v in edges:
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) out of range")
            e = (min(u, v), max(u, v))
            if e in canon:
                raise InputError(f"duplicate edge {e}")
            canon.add(e)
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in canon:
            adj[u].append(v)
            adj[v].append(u)
        nbrs = tuple(tuple(sorted(a)) for a in adj)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        object.__setattr__(self, "neighbors", nbrs)
        object.__setattr__(
            self, "_rank", tuple({u: k + 1 for k, u in enumerate(nb)} for nb in nbrs)
        )

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._rank[u]

    def sigma(self, v: int, u: int) -> int:
        """1-based position of neighbour ``u`` in ``v``'s neighbour list."""
        return self._rank[v][u]

    def sigma_inv(self, v: int, k: int) -> int:
        return self.neighbors[v][k - 1]

    def bfs_distances(self, source: int) -> list[int]:
        """Hop distances from ``source``; -1 marks unreachable vertices."""
        dist = [-1] * self.n
        dist[source] = 0
        frontier = [source]
        while frontier:
            nxt = []
            for u in frontier:
                for w in self.neighbors[u]:
                    if dist[w] < 0:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            frontier = nxt
        return dist

    def components(self) -> list[int]:
        """Connected-component label per vertex."""
        label = [-1] * self.n
        c = 0
        for s in range(self.n):
            if label[s] >= 0:
                continue
            label[s] = c
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self.neighbors[u]:
                    if label[w] < 0:
                        label[w] = c
                        stack.append(w)
            c += 1
        return label


@dataclass(frozen=True)
class Arrangement:
    """Injective placement of agents: ``location[a]`` is agent ``a``'s vertex."""

    location: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "location", tuple(int(v) for v in self.location))
        if len(set(self.location)) != len(self.location):
            raise InputError("two agents share a vertex")
        for v in self.location:
            if not 0 <= v < self.n:
                raise InputError(f"vertex {v} out of range")

    @property
    def agent_count(self) -> int:
        return len(self.location)

    @property
    def inverse(self) -> tuple[int | None, ...]:
        inv: list[int | None] = [None] * self.n
        for a, v in enumerate(self.location):
            inv[v] = a
        return tuple(inv)

    @classmethod
    def from_inverse(cls, inverse: Sequence[int | None]) -> "Arrangement":
        placed = {a: v for v, a in enumerate(inverse) if a is not None}
        if sorted(placed) != list(range(len(placed))):
            raise InputError("inverse arrangement does not place agents 0..mu-1")
        return cls(tuple(placed[a] for a in range(len(placed))), len(inverse))


@dataclass(frozen=True)
class CpfInstance:
    graph: Graph
    initial: Arrangement
    goal: Arrangement

    def __post_init__(self):
        if self.initial.agent_count != self.goal.agent_count:
            raise InputError("initial and goal place different numbers of agents")
        if self.initial.n != self.graph.n or self.goal.n != self.graph.n:
            raise InputError("arrangement size does not match graph")

    @property
    def agent_count(self) -> int:
        return self.initial.agent_count

    @property
    def n(self) -> int:
        return self.graph.n

    @classmethod
    def build(cls, n: int, edges, starts: Sequence[int], goals: Sequence[int]) -> "CpfInstance":
        return cls(Graph(n, edges), Arrangement(tuple(starts), n), Arrangement(tuple(goals), n))


@dataclass(frozen=True)
class Solution:
    steps: tuple[Arrangement, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise InputError("a solution has at least one arrangement")

    @property
    def makespan(self) -> int:
        return len(self.steps) - 1


@dataclass(frozen=True)
class SolutionMetrics:
    makespan: int
    total_moves: int


def transition_error(before: Arrangement, after: Arrangement, graph: Graph) -> str | None:
    """Describe the first violated validity condition, or None if valid."""
    if before.agent_count != after.agent_count:
        raise InputError("arrangements place different agent sets")
    occupied = before.inverse
    for a, (u, v) in enumerate(zip(before.location, after.location)):
        if u == v:
            continue
        if not graph.has_edge(u, v):
            return f"agent {a + 1} jumps {u + 1}->{v + 1} without an edge"
        if occupied[v] is not None:
            return f"agent {a + 1} enters vertex {v + 1} occupied by agent {occupied[v] + 1}"
    # Arrangement construction already rejects non-injective placements, but
    # callers may build Arrangement-like objects by hand.
    if len(set(after.location)) != len(after.location):
        return "two agents end on the same vertex"
    return None


def validate_transition(before: Arrangement, after: Arrangement, graph: Graph) -> bool:
    return transition_error(before, after, graph) is None


def solution_error(sol: Solution, inst: CpfInstance) -> str | None:
    """First failure found while checking ``sol`` against ``inst``."""
    if sol.steps[0] != inst.initial:
        return "step 0 differs from the initial arrangement"
    if sol.steps[-1] != inst.goal:
        return f"step {sol.makespan} differs from the goal arrangement"
    for t in range(sol.makespan):
        try:
            err = transition_error(sol.steps[t], sol.steps[t + 1], inst.graph)
        except InputError as exc:
            err = str(exc)
        if err is not None:
            return f"step {t}->{t + 1}: {err}"
    return None


def validate_solution(sol: Solution, inst: CpfInstance) -> bool:
    return solution_error(sol, inst) is None


def metrics(sol: Solution) -> SolutionMetrics:
    moves = 0
    for a, b in zip(sol.steps, sol.steps[1:]):
        moves += sum(1 for u, v in zip(a.location, b.location) if u != v)
    return SolutionMetrics(sol.makespan, moves)


# --- text formats -----------------------------------------------------------


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def read_instance(data: str | bytes) -> CpfInstance:
    text = data.decode() if isinstance(data, bytes) else data
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty instance file")
    lineno, head = lines[0]
    if head[0] != "cpf" or len(head) != 4:
        raise ParseError("header must be 'cpf <n> <m> <mu>'", lineno)
    n, m, mu = _ints(head[1:], lineno)
    if n < 1 or m < 0 or mu < 0 or mu > n:
        raise ParseError(f"bad header sizes n={n} m={m} mu={mu}", lineno)
    edges: list[tuple[int, int]] = []
    seen_edges: set[tuple[int, int]] = set()
    starts: dict[int, int] = {}
    goals: dict[int, int] = {}
    for lineno, tok in lines[1:]:
        kind = tok[0]
        if kind == "e":
            if len(tok) != 3:
                raise ParseError("edge line must be 'e <u> <v>'", lineno)
            u, v = _ints(tok[1:], lineno)
            for x in (u, v):
                if not 1 <= x <= n:
                    raise ParseError(f"dangling vertex id {x}", lineno)
            if u == v:
                raise ParseError(f"self-loop at vertex {u}", lineno)
            key = (min(u, v), max(u, v))
            if key in seen_edges:
                raise ParseError(f"duplicate edge {u} {v}", lineno)
            seen_edges.add(key)
            edges.append((u - 1, v - 1))
        elif kind == "a":
            if len(tok) != 4:
                raise ParseError("agent line must be 'a <id> <start> <goal>'", lineno)
            aid, s, g = _ints(tok[1:], lineno)
            if not 1 <= aid <= mu:
                raise ParseError(f"agent id {aid} outside 1..{mu}", lineno)
            if aid in starts:
                raise ParseError(f"agent {aid} listed twice", lineno)
            for x in (s, g):
                if not 1 <= x <= n:
                    raise ParseError(f"dangling vertex id {x}", lineno)
            if s - 1 in starts.values():
                raise ParseError(f"two agents start on vertex {s}", lineno)
            if g - 1 in goals.values():
                raise ParseError(f"two agents share goal vertex {g}", lineno)
            starts[aid] = s - 1
            goals[aid] = g - 1
        else:
            raise ParseError(f"unknown line type {kind!r}", lineno)
    if len(edges) != m:
        raise ParseError(f"header announces {m} edges, found {len(edges)}")
    if len(starts) != mu:
        raise ParseError(f"header announces {mu} agents, found {len(starts)}")
    order = range(1, mu + 1)
    return CpfInstance.build(n, edges, [starts[a] for a in order], [goals[a] for a in order])


def write_instance(inst: CpfInstance) -> str:
    g = inst.graph
    out = io.StringIO()
    out.write(f"cpf {g.n} {g.m} {inst.agent_count}\n")
    for u, v in g.edges:
        out.write(f"e {u + 1} {v + 1}\n")
    for a, (s, t) in enumerate(zip(inst.initial.location, inst.goal.location)):
        out.write(f"a {a + 1} {s + 1} {t + 1}\n")
    return out.getvalue()


def write_solution(sol: Solution) -> str:
    out = io.StringIO()
    for t, arr in enumerate(sol.steps):
        cells = " ".join(f"a{a + 1}@{v + 1}" for a, v in enumerate(arr.location))
        out.write(f"t {t}: {cells}".rstrip() + "\n")
    return out.getvalue()


def read_solution(data: str | bytes, n: int) -> Solution:
    text = data.decode() if isinstance(data, bytes) else data
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not line.startswith("t "):
            raise ParseError("solution line must start with 't <l>:'", lineno)
        head, _, rest = line.partition(":")
        try:
            t = int(head.split()[1])
        except (IndexError, ValueError):
            raise ParseError(f"bad time stamp {head!r}", lineno) from None
        if t != len(steps):
            raise ParseError(f"expected time step {len(steps)}, got {t}", lineno)
        placed: dict[int, int] = {}
        for cell in rest.split():
            agent, sep, vertex = cell.partition("@")
            if not sep or not agent.startswith("a"):
                raise ParseError(f"bad cell {cell!r}", lineno)
            try:
                placed[int(agent[1:]) - 1] = int(vertex) - 1
            except ValueError:
                raise ParseError(f"bad cell {cell!r}", lineno) from None
        if sorted(placed) != list(range(len(placed))):
            raise ParseError("agents must be numbered a1..aμ", lineno)
        try:
            steps.append(Arrangement(tuple(placed[a] for a in range(len(placed))), n))
        except InputError as exc:
            raise ParseError(str(exc), lineno) from None
    if not steps:
        raise ParseError("empty solution file")
    return Solution(tuple(steps))
