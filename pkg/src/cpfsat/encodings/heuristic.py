"""Distance-based pruning clauses.

Each excluded (agent, vertex, layer) triple from a reach window becomes one
clause saying the agent is not there.  They follow from the base formula, so
adding them never changes satisfiability.
"""
from __future__ import annotations

import numpy as np

from ..cnf import LIT_DTYPE, EncodingError, const_neq
from ..expansion import ReachWindow
from .common import EncodedInstance, EncodingKind


def heuristic_block(enc: EncodedInstance, windows: ReachWindow) -> np.ndarray:
    """All pruning clauses as one rectangular block."""
    if windows.eta != enc.eta:
        raise EncodingError(f"reach window built for eta={windows.eta}, encoding has eta={enc.eta}")
    excluded = np.array(list(windows.excluded()), dtype=np.int64).reshape(-1, 3)
    agents, vs, ls = excluded.T
    if not len(ls):
        return np.zeros((0, 1), dtype=LIT_DTYPE)
    vm = enc.varmap
    if enc.kind in (EncodingKind.DIRECT, EncodingKind.SIMPLIFIED):
        x = np.stack([vm.ids("X", l) for l in range(enc.eta + 1)])
        return -x[ls, agents, vs][:, None]
    if enc.kind is EncodingKind.ALLDIFFERENT:
        loc = np.stack([vm.ids("L", l) for l in range(enc.eta + 1)])
        return const_neq(loc[ls, agents], vs)
    occ = np.stack([vm.ids("A", l) for l in range(enc.eta + 1)])
    return const_neq(occ[ls, vs], agents + 1)


def apply_distance_heuristic(enc: EncodedInstance, windows: ReachWindow) -> EncodedInstance:
    """Append the pruning clauses to ``enc.cnf`` (in place) and return ``enc``."""
    block = heuristic_block(enc, windows)
    with enc.cnf.family("heuristic"):
        before = len(enc.cnf)
        enc.cnf.add_block(block)
        enc.heuristic_clauses += len(enc.cnf) - before
    return enc
