"""ALL-DIFFERENT encoding: one location bit vector per agent and layer.

Locations are stored as 0-based vertex indices so that ``ceil(log2 n)`` bits
suffice.  Distinctness within a layer and "target was empty" across layers
are both pairwise bit-vector inequalities.
"""
from __future__ import annotations

import numpy as np

from ..cnf import VarMap, bit_width, const_eq, forbid_extra_states, var_neq
from ..model import Arrangement, CpfInstance, Solution
from .common import (DecodeError, EncodedInstance, EncodingKind, Topology, bits_value,
                     check_eta, new_cnf)


def agent_pairs(mu: int) -> tuple[np.ndarray, np.ndarray]:
    i, j = np.triu_indices(mu, 1)
    return i.astype(np.int64), j.astype(np.int64)


def ordered_pairs(mu: int) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.nonzero(~np.eye(mu, dtype=bool))
    return a.astype(np.int64), b.astype(np.int64)


def encode_alldifferent(inst: CpfInstance, eta: int, counting: bool = False) -> EncodedInstance:
    check_eta(eta)
    n, mu = inst.n, inst.agent_count
    topo = Topology(inst.graph)
    w = bit_width(n)
    pi, pj = agent_pairs(mu)
    oa, ob = ordered_pairs(mu)

    vm = VarMap()
    L, E, D, DM = [], [], [], []
    for l in range(eta + 1):
        L.append(vm.alloc("L", l, (mu, w)))
        E.append(vm.alloc("e", l, (mu, n)))
        D.append(vm.alloc("d_layer", l, (len(pi), w)))
        if l < eta:
            DM.append(vm.alloc("d_move", l, (len(oa), w)))
    cnf = new_cnf(vm, counting)

    values = np.arange(n)
    for l in range(eta + 1):
        with cnf.family("e_link"):
            # eq[a, j, :] = literals of L_a == j
            eq = const_eq(np.broadcast_to(L[l][:, None, :], (mu, n, w)), values[None, :])
            fwd = np.stack(np.broadcast_arrays(-E[l][:, :, None], eq), -1).reshape(-1, 2)
            cnf.add_block(fwd)
            cnf.add_block(np.concatenate([E[l][:, :, None], -eq], axis=2).reshape(-1, w + 1))
        with cnf.family("all_different"):
            for block in var_neq(L[l][pi], L[l][pj], D[l]):
                cnf.add_block(block)
        with cnf.family("extra_states"):
            cnf.add_block(forbid_extra_states(L[l], n))
        if l == eta:
            break
        with cnf.family("target_empty"):
            for block in var_neq(L[l + 1][oa], L[l][ob], DM[l]):
                cnf.add_block(block)
        with cnf.family("move_along_edges"):
            for d, vs, nb, _, _ in topo.degree_groups:
                here = E[l][:, vs]                              # (mu, k)
                stay = E[l + 1][:, vs]                          # (mu, k)
                nxt = E[l + 1][:, nb]                           # (mu, k, d)
                cl = np.concatenate([-here[..., None], stay[..., None], nxt], axis=2)
                cnf.add_block(cl.reshape(-1, d + 2))

    with cnf.family("boundary"):
        if w and mu:
            cnf.add_units(const_eq(L[0], np.array(inst.initial.location)).reshape(-1))
            cnf.add_units(const_eq(L[eta], np.array(inst.goal.location)).reshape(-1))
    return EncodedInstance(EncodingKind.ALLDIFFERENT, eta, inst, cnf, vm)


def decode_alldifferent(enc: EncodedInstance, model: np.ndarray) -> Solution:
    n = enc.inst.n
    steps = []
    for l in range(enc.eta + 1):
        loc = bits_value(model, enc.varmap.ids("L", l))
        if (loc >= n).any():
            a = int(np.nonzero(loc >= n)[0][0])
            raise DecodeError(f"agent {a + 1} has out-of-range location at layer {l}")
        try:
            steps.append(Arrangement(tuple(loc.tolist()), n))
        except ValueError as exc:
            raise DecodeError(f"layer {l}: {exc}") from None
    return Solution(tuple(steps))
