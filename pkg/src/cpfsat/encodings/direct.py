"""DIRECT and SIMPLIFIED encodings: one Boolean per (agent, vertex, layer).

The vacancy constraint is emitted for every ordered arc ``v -> u``: an agent
moving along it needs ``u`` empty at the earlier layer.  The symmetric
"source empty afterwards" half is implied (whoever would enter the source
would need it empty beforehand), so it is not emitted.  SIMPLIFIED routes the
vacancy through one auxiliary "vertex is empty" variable per vertex/layer.
"""
from __future__ import annotations

import numpy as np

from ..cnf import VarMap
from ..model import Arrangement, CpfInstance, Solution
from .common import (DecodeError, EncodedInstance, EncodingKind, Topology, check_eta, new_cnf,
                     pairwise_amo)


def _encode(inst: CpfInstance, eta: int, simplified: bool, counting: bool) -> EncodedInstance:
    check_eta(eta)
    n, mu = inst.n, inst.agent_count
    topo = Topology(inst.graph)
    src, dst = topo.arc_src, topo.arc_dst

    vm = VarMap()
    X, EMPTY = [], []
    for l in range(eta + 1):
        X.append(vm.alloc("X", l, (mu, n)))
        if simplified:
            EMPTY.append(vm.alloc("empty", l, n))
    cnf = new_cnf(vm, counting)

    for l in range(eta + 1):
        with cnf.family("one_vertex_per_agent"):
            cnf.add_block(pairwise_amo(X[l]))
            cnf.add_block(X[l])
        with cnf.family("one_agent_per_vertex"):
            cnf.add_block(pairwise_amo(X[l].T))
        if simplified:
            with cnf.family("empty_link"):
                cnf.add_block(np.stack(np.broadcast_arrays(-EMPTY[l][None, :], -X[l]), -1).reshape(-1, 2))
        if l == eta:
            break
        with cnf.family("move_along_edges"):
            for d, vs, nb, _, _ in topo.degree_groups:
                fwd = np.concatenate([-X[l][:, vs, None], X[l + 1][:, vs, None], X[l + 1][:, nb]], axis=2)
                bwd = np.concatenate([-X[l + 1][:, vs, None], X[l][:, vs, None], X[l][:, nb]], axis=2)
                cnf.add_block(fwd.reshape(-1, d + 2))
                cnf.add_block(bwd.reshape(-1, d + 2))
        with cnf.family("target_vacant"):
            leave = -X[l][:, src]          # (mu, arcs)
            arrive = -X[l + 1][:, dst]
            if simplified:
                cl = np.stack([leave, arrive, np.broadcast_to(EMPTY[l][dst], leave.shape)], -1)
                cnf.add_block(cl.reshape(-1, 3))
            else:
                # (mover a, arc, blocker b)
                blocker = -X[l][:, dst]
                cl = np.stack(np.broadcast_arrays(leave[:, :, None], arrive[:, :, None],
                                                  blocker.T[None, :, :]), -1)
                cnf.add_block(cl.reshape(-1, 3))

    with cnf.family("boundary"):
        for layer, arr in ((0, inst.initial), (eta, inst.goal)):
            truth = np.zeros((mu, n), dtype=bool)
            truth[np.arange(mu), list(arr.location)] = True
            cnf.add_units(np.where(truth, X[layer], -X[layer]).reshape(-1))
    kind = EncodingKind.SIMPLIFIED if simplified else EncodingKind.DIRECT
    return EncodedInstance(kind, eta, inst, cnf, vm)


def encode_direct(inst: CpfInstance, eta: int, counting: bool = False) -> EncodedInstance:
    return _encode(inst, eta, False, counting)


def encode_simplified(inst: CpfInstance, eta: int, counting: bool = False) -> EncodedInstance:
    return _encode(inst, eta, True, counting)


def decode_direct(enc: EncodedInstance, model: np.ndarray) -> Solution:
    n, mu = enc.inst.n, enc.inst.agent_count
    steps = []
    for l in range(enc.eta + 1):
        x = model[enc.varmap.ids("X", l)] if mu else np.zeros((0, n), dtype=bool)
        per_agent = x.sum(axis=1)
        if (per_agent != 1).any():
            a = int(np.nonzero(per_agent != 1)[0][0])
            raise DecodeError(f"agent {a + 1} occupies {int(per_agent[a])} vertices at layer {l}")
        try:
            steps.append(Arrangement(tuple(x.argmax(axis=1).tolist()), n))
        except ValueError as exc:
            raise DecodeError(f"layer {l}: {exc}") from None
    return Solution(tuple(steps))
