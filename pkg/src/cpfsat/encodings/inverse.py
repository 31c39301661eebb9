"""INVERSE encoding: per-vertex occupant bit vectors plus transition vectors.

Occupant ``A[v]`` holds 0 (empty) or agent index + 1.  Transition ``T[v]``
holds 0 (no move), ``k`` in ``1..deg`` (the occupant leaves to the k-th
neighbour) or ``deg + k`` (an agent arrives from the k-th neighbour).
"""
from __future__ import annotations

import numpy as np

from ..cnf import VarMap, bit_width, const_eq, forbid_extra_states, var_eq
from ..model import Arrangement, CpfInstance, Solution
from .common import (DecodeError, EncodedInstance, EncodingKind, Topology, bits_value,
                     check_eta, new_cnf)


def _allocate(inst: CpfInstance, eta: int, topo: Topology):
    n, mu = inst.n, inst.agent_count
    wa = bit_width(mu + 1)
    vm = VarMap()
    A, T, Z, EQS, EQM, TR = [], [], [], [], [], []
    for l in range(eta + 1):
        A.append(vm.alloc("A", l, (n, wa)))
        if l == eta:
            break
        T.append([vm.alloc("T", l, bit_width(2 * d + 1), tag=(v,)) for v, d in enumerate(topo.deg.tolist())])
        Z.append(vm.alloc("zero", l, n))
        EQS.append(vm.alloc("eq_stay", l, n))
        EQM.append(vm.alloc("eq_move", l, len(topo.arc_src)))
        TR.append([vm.alloc("tran", l, 2 * d + 1, tag=(v,)) for v, d in enumerate(topo.deg.tolist())])
    return vm, A, T, Z, EQS, EQM, TR


def encode_inverse(inst: CpfInstance, eta: int, counting: bool = False) -> EncodedInstance:
    check_eta(eta)
    g = inst.graph
    n, mu = inst.n, inst.agent_count
    topo = Topology(g)
    vm, A, T, Z, EQS, EQM, TR = _allocate(inst, eta, topo)
    cnf = new_cnf(vm, counting)
    wa = bit_width(mu + 1)

    for l in range(eta):
        with cnf.family("zero_link"):
            # zero => A == 0, bit by bit
            cnf.add_block(np.stack(np.broadcast_arrays(-Z[l][:, None], -A[l]), -1).reshape(-1, 2))
        with cnf.family("eq_link"):
            cnf.add_block(var_eq(A[l], A[l + 1], guard=EQS[l][:, None]))
            a_src = A[l][topo.arc_src]
            a_dst_next = A[l + 1][topo.arc_dst]
            cnf.add_block(var_eq(a_src, a_dst_next, guard=EQM[l][:, None]))
        for v in range(n):
            d = int(topo.deg[v])
            tv, trv = T[l][v], TR[l][v]
            with cnf.family("tran_link"):
                eq = const_eq(np.broadcast_to(tv, (2 * d + 1, tv.size)), np.arange(2 * d + 1))
                fwd = np.stack(np.broadcast_arrays(-trv[:, None], eq), -1).reshape(-1, 2)
                cnf.add_block(fwd)
                cnf.add_block(np.concatenate([trv[:, None], -eq], axis=1))
            with cnf.family("stay"):
                cnf.add([-trv[0], EQS[l][v]])
            for k in range(1, d + 1):
                u = g.sigma_inv(v, k)
                du = int(topo.deg[u])
                arc = topo.arc_index[(v, u)]
                with cnf.family("leave"):
                    cnf.add([-trv[k], Z[l][u]])
                    cnf.add([-trv[k], EQM[l][arc]])
                    cnf.add([-trv[k], TR[l][u][g.sigma(u, v) + du]])
                with cnf.family("arrive"):
                    cnf.add([-trv[d + k], TR[l][u][g.sigma(u, v)]])
            with cnf.family("extra_states"):
                cnf.add_block(forbid_extra_states(tv, 2 * d + 1))
    with cnf.family("extra_states"):
        for l in range(eta + 1):
            cnf.add_block(forbid_extra_states(A[l], mu + 1))

    occupant0 = np.zeros(n, dtype=np.int64)
    occupant0[list(inst.initial.location)] = np.arange(1, mu + 1)
    occupant_goal = np.zeros(n, dtype=np.int64)
    occupant_goal[list(inst.goal.location)] = np.arange(1, mu + 1)
    with cnf.family("boundary"):
        if wa:
            cnf.add_units(const_eq(A[0], occupant0).reshape(-1))
            cnf.add_units(const_eq(A[eta], occupant_goal).reshape(-1))
    return EncodedInstance(EncodingKind.INVERSE, eta, inst, cnf, vm)


def occupant_layers(enc: EncodedInstance, model: np.ndarray) -> list[np.ndarray]:
    return [bits_value(model, enc.varmap.ids("A", l)) for l in range(enc.eta + 1)]


def arrangements_from_occupants(layers: list[np.ndarray], mu: int) -> Solution:
    steps = []
    for l, occ in enumerate(layers):
        inverse = [None if x == 0 else int(x) - 1 for x in occ.tolist()]
        counts = np.bincount(occ, minlength=mu + 1)[1:]
        if counts.size != mu or (counts != 1).any():
            bad = int(np.nonzero(counts != 1)[0][0]) + 1 if counts.size >= mu else mu + 1
            raise DecodeError(f"agent {bad} does not occur exactly once at layer {l}")
        steps.append(Arrangement.from_inverse(inverse))
    return Solution(tuple(steps))


def decode_inverse(enc: EncodedInstance, model: np.ndarray) -> Solution:
    return arrangements_from_occupants(occupant_layers(enc, model), enc.inst.agent_count)
