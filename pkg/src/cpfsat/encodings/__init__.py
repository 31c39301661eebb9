"""CPF to CNF encoders, the distance heuristic and model decoding."""
from __future__ import annotations

import numpy as np

from ..expansion import reach_windows
from ..model import CpfInstance, Solution
from .alldifferent import decode_alldifferent, encode_alldifferent
from .common import DecodeError, EncodedInstance, EncodingKind, model_array
from .direct import decode_direct, encode_direct, encode_simplified
from .heuristic import apply_distance_heuristic, heuristic_block
from .inverse import decode_inverse, encode_inverse
from .matching import decode_matching, encode_matching

ENCODERS = {
    EncodingKind.INVERSE: encode_inverse,
    EncodingKind.ALLDIFFERENT: encode_alldifferent,
    EncodingKind.MATCHING: encode_matching,
    EncodingKind.DIRECT: encode_direct,
    EncodingKind.SIMPLIFIED: encode_simplified,
}

_DECODERS = {
    EncodingKind.INVERSE: decode_inverse,
    EncodingKind.ALLDIFFERENT: decode_alldifferent,
    EncodingKind.MATCHING: decode_matching,
    EncodingKind.DIRECT: decode_direct,
    EncodingKind.SIMPLIFIED: decode_direct,
}


def encode(inst: CpfInstance, eta: int, kind: EncodingKind | str = EncodingKind.SIMPLIFIED,
           heuristic: bool = True, counting: bool = False) -> EncodedInstance:
    """Encode ``inst`` at makespan bound ``eta``, optionally with pruning clauses."""
    if isinstance(kind, str) and not isinstance(kind, EncodingKind):
        kind = EncodingKind.parse(kind)
    enc = ENCODERS[kind](inst, eta, counting=counting)
    if heuristic:
        apply_distance_heuristic(enc, reach_windows(inst, eta))
    return enc


def decode(enc: EncodedInstance, model, inst: CpfInstance | None = None) -> Solution:
    """Rebuild the plan from a satisfying model (dict or bool array)."""
    if inst is not None and inst is not enc.inst:
        if inst != enc.inst:
            raise DecodeError("instance does not match the encoded instance")
    arr = model_array(model, enc.cnf.var_count)
    return _DECODERS[enc.kind](enc, arr)


__all__ = [
    "DecodeError", "ENCODERS", "EncodedInstance", "EncodingKind", "apply_distance_heuristic",
    "decode", "encode", "encode_alldifferent", "encode_direct", "encode_inverse",
    "encode_matching", "encode_simplified", "heuristic_block",
]
