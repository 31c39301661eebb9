from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..cnf import Cnf, CountingCnf, EncodingError, EncodingStats, VarMap
from ..model import CpfInstance, Graph


class EncodingKind(str, enum.Enum):
    INVERSE = "inverse"
    ALLDIFFERENT = "alldifferent"
    MATCHING = "matching"
    DIRECT = "direct"
    SIMPLIFIED = "simplified"

    @classmethod
    def parse(cls, name: str) -> "EncodingKind":
        key = name.strip().lower().replace("-", "").replace("_", "")
        for k in cls:
            if k.value == key:
                return k
        raise ValueError(f"unknown encoding {name!r}; choose from {[k.value for k in cls]}")


class DecodeError(RuntimeError):
    """A model that should satisfy the formula does not describe a plan."""


@dataclass
class EncodedInstance:
    kind: EncodingKind
    eta: int
    inst: CpfInstance
    cnf: Cnf
    varmap: VarMap
    heuristic_clauses: int = 0

    @property
    def stats(self) -> EncodingStats:
        return self.cnf.stats()


def new_cnf(varmap: VarMap, counting: bool) -> Cnf:
    return (CountingCnf if counting else Cnf)(varmap.size)


class Topology:
    """Array views of a graph that the vectorised encoders share."""

    def __init__(self, graph: Graph):
        self.graph = graph
        n = graph.n
        self.deg = np.array([graph.degree(v) for v in range(n)], dtype=np.int64)
        # directed arcs v->u, grouped by source, neighbours ascending
        src = [v for v in range(n) for _ in graph.neighbors[v]]
        dst = [u for v in range(n) for u in graph.neighbors[v]]
        self.arc_src = np.array(src, dtype=np.int64)
        self.arc_dst = np.array(dst, dtype=np.int64)
        self.arc_index = {(v, u): i for i, (v, u) in enumerate(zip(src, dst))}
        # arcs entering each vertex, ordered like the neighbour list of the target
        self.in_arcs = [[self.arc_index[(u, v)] for u in graph.neighbors[v]] for v in range(n)]
        self.out_arcs = [[self.arc_index[(v, u)] for u in graph.neighbors[v]] for v in range(n)]

    @cached_property
    def degree_groups(self) -> list[tuple[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
        """``(deg, vertices, neighbours, out_arcs, in_arcs)`` per distinct degree."""
        groups = []
        for d in sorted(set(self.deg.tolist())):
            vs = np.nonzero(self.deg == d)[0]
            nb = np.array([self.graph.neighbors[v] for v in vs], dtype=np.int64).reshape(len(vs), d)
            oa = np.array([self.out_arcs[v] for v in vs], dtype=np.int64).reshape(len(vs), d)
            ia = np.array([self.in_arcs[v] for v in vs], dtype=np.int64).reshape(len(vs), d)
            groups.append((d, vs, nb, oa, ia))
        return groups


def check_eta(eta: int):
    if eta < 1:
        raise EncodingError("encodings need eta >= 1 (eta = 0 is handled by the driver)")


def bits_value(model: np.ndarray, ids: np.ndarray) -> np.ndarray:
    """Integer values of bit vectors ``ids[..., w]`` under ``model``."""
    w = ids.shape[-1]
    if w == 0:
        return np.zeros(ids.shape[:-1], dtype=np.int64)
    return (model[ids].astype(np.int64) << np.arange(w)).sum(axis=-1)


def pairwise_amo(lits: np.ndarray) -> np.ndarray:
    """Binary at-most-one clauses over the last axis of ``lits``."""
    k = lits.shape[-1]
    i, j = np.triu_indices(k, 1)
    cl = np.stack([-lits[..., i], -lits[..., j]], axis=-1)
    return cl.reshape(-1, 2)


def model_array(model, var_count: int) -> np.ndarray:
    """Normalise dict / bool-array models into a bool array indexed by var id."""
    if isinstance(model, dict):
        arr = np.zeros(var_count + 1, dtype=bool)
        for v, b in model.items():
            if 1 <= v <= var_count:
                arr[v] = bool(b)
        return arr
    arr = np.asarray(model, dtype=bool)
    if arr.shape[0] < var_count + 1:
        raise DecodeError("model shorter than the variable range")
    return arr
