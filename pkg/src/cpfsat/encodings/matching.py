"""MATCHING encoding: an anonymous unit flow through the time expansion plus
occupant bit vectors that carry agent identities along the selected arcs.

Flow arcs are directed: one variable per arc ``v -> u`` of every edge and one
wait variable per vertex, for layers ``0..eta-1``.
"""
from __future__ import annotations

import numpy as np

from ..cnf import VarMap, bit_width, const_eq, forbid_extra_states, var_eq
from ..model import CpfInstance, Solution
from .common import (EncodedInstance, EncodingKind, Topology, bits_value, check_eta, new_cnf,
                     pairwise_amo)
from .inverse import arrangements_from_occupants


def encode_matching(inst: CpfInstance, eta: int, counting: bool = False) -> EncodedInstance:
    check_eta(eta)
    n, mu = inst.n, inst.agent_count
    topo = Topology(inst.graph)
    wa = bit_width(mu + 1)
    narcs = len(topo.arc_src)

    vm = VarMap()
    M, A, W, F = [], [], [], []
    for l in range(eta + 1):
        M.append(vm.alloc("M", l, n))
        A.append(vm.alloc("A", l, (n, wa)))
        if l < eta:
            W.append(vm.alloc("wait", l, n))
            F.append(vm.alloc("arc", l, narcs))
    cnf = new_cnf(vm, counting)
    src, dst = topo.arc_src, topo.arc_dst

    for l in range(eta + 1):
        with cnf.family("occupied_in_flow"):
            cnf.add_block(np.stack(np.broadcast_arrays(-A[l], M[l][:, None]), -1).reshape(-1, 2))
        with cnf.family("extra_states"):
            cnf.add_block(forbid_extra_states(A[l], mu + 1))
        if l == eta:
            break
        with cnf.family("flow_endpoints"):
            cnf.add_block(np.stack([-F[l], M[l][src]], 1))
            cnf.add_block(np.stack([-F[l], M[l + 1][dst]], 1))
            cnf.add_block(np.stack([-W[l], M[l]], 1))
            cnf.add_block(np.stack([-W[l], M[l + 1]], 1))
        for d, vs, _, oa, ia in topo.degree_groups:
            out_lits = np.concatenate([W[l][vs][:, None], F[l][oa]], axis=1)   # (k, d+1)
            in_lits = np.concatenate([W[l][vs][:, None], F[l][ia]], axis=1)
            with cnf.family("at_most_one"):
                cnf.add_block(pairwise_amo(out_lits))
                cnf.add_block(pairwise_amo(in_lits))
            with cnf.family("at_least_one"):
                cnf.add_block(np.concatenate([-M[l][vs][:, None], out_lits], axis=1))
                cnf.add_block(np.concatenate([-M[l + 1][vs][:, None], in_lits], axis=1))
        with cnf.family("no_overlap"):
            cnf.add_block(np.stack([-F[l], -M[l][dst]], 1))
        with cnf.family("mapping"):
            cnf.add_block(var_eq(A[l][src], A[l + 1][dst], guard=F[l][:, None]))
            cnf.add_block(var_eq(A[l], A[l + 1], guard=W[l][:, None]))

    def boundary(layer: int, location):
        occ = np.zeros(n, dtype=np.int64)
        occ[list(location)] = np.arange(1, mu + 1)
        if wa:
            cnf.add_units(const_eq(A[layer], occ).reshape(-1))
        cnf.add_units(np.where(occ > 0, M[layer], -M[layer]))

    with cnf.family("boundary"):
        boundary(0, inst.initial.location)
        boundary(eta, inst.goal.location)
    return EncodedInstance(EncodingKind.MATCHING, eta, inst, cnf, vm)


def decode_matching(enc: EncodedInstance, model: np.ndarray) -> Solution:
    layers = [bits_value(model, enc.varmap.ids("A", l)) for l in range(enc.eta + 1)]
    return arrangements_from_occupants(layers, enc.inst.agent_count)
