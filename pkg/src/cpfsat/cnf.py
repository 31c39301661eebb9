"""Clause database, variable map, bit-vector gadgets and DIMACS I/O.

Clauses are stored as CSR chunks (flat literal array plus offsets) so that
encoders can emit millions of clauses as numpy blocks.  Bit vectors are
integer arrays of SAT variable ids whose last axis is the bit index
(bit 0 = least significant); every gadget broadcasts over leading axes.
"""
from __future__ import annotations

import bisect
import io
import math
from collections import Counter, defaultdict
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

LIT_DTYPE = np.int64


class EncodingError(RuntimeError):
    """Encoder invariant broken (bad width, constant out of range)."""


class TriviallyUnsat(EncodingError):
    """A constraint over a width-0 bit vector can never hold."""


class SolverProtocolError(RuntimeError):
    pass


def bit_width(domain_size: int) -> int:
    """Bits needed for values ``0..domain_size-1`` (0 for a one-value domain)."""
    if domain_size < 1:
        raise EncodingError("empty domain")
    return (int(domain_size) - 1).bit_length()


def ceil_log2(x: int) -> int:
    return 0 if x <= 1 else math.ceil(math.log2(x))


# --- variable map -------------------------------------------------------------


@dataclass(frozen=True)
class _VarBlock:
    start: int
    name: tuple
    shape: tuple[int, ...]

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64)) if self.shape else 1


class VarMap:
    """Semantic key -> SAT variable id, allocated in contiguous blocks.

    A key is ``(family, layer, *tag, *index)`` where ``tag`` names a block
    (e.g. the vertex owning a variable-width bit vector) and ``index`` is the
    position inside the block.  Blocks are numbered in allocation order, so
    an encoder that walks layers outermost gets a layer-major layout.
    """

    def __init__(self):
        self._blocks: list[_VarBlock] = []
        self._starts: list[int] = []
        self._by_name: dict[tuple, _VarBlock] = {}
        self._taglen: dict[str, int] = {}
        self.size = 0

    def alloc(self, family: str, layer: int, shape: Sequence[int] | int, tag: tuple = ()) -> np.ndarray:
        shape = (shape,) if isinstance(shape, int) else tuple(int(s) for s in shape)
        name = (family, int(layer), *tag)
        if self._taglen.setdefault(family, len(tag)) != len(tag):
            raise EncodingError(f"family {family} used with inconsistent tags")
        if name in self._by_name:
            raise EncodingError(f"block {name} allocated twice")
        block = _VarBlock(self.size + 1, name, shape)
        self._by_name[name] = block
        if block.size:
            self._blocks.append(block)
            self._starts.append(block.start)
        self.size += block.size
        return np.arange(block.start, block.start + block.size, dtype=LIT_DTYPE).reshape(shape)

    def ids(self, family: str, layer: int, tag: tuple = ()) -> np.ndarray:
        b = self._by_name[(family, int(layer), *tag)]
        return np.arange(b.start, b.start + b.size, dtype=LIT_DTYPE).reshape(b.shape)

    def __getitem__(self, key: tuple) -> int:
        family = key[0]
        cut = 2 + self._taglen[family]
        b = self._by_name[tuple(key[:cut])]
        index = tuple(key[cut:])
        return b.start + int(np.ravel_multi_index(index, b.shape)) if b.shape else b.start

    def __contains__(self, key: tuple) -> bool:
        try:
            self[key]
        except (KeyError, ValueError):
            return False
        return True

    def key(self, var: int) -> tuple:
        i = bisect.bisect_right(self._starts, var) - 1
        if i < 0 or var > self.size:
            raise KeyError(var)
        b = self._blocks[i]
        idx = np.unravel_index(var - b.start, b.shape) if b.shape else ()
        return (*b.name, *(int(k) for k in idx))

    def family_sizes(self) -> Counter:
        c: Counter = Counter()
        for b in self._by_name.values():
            c[b.name[0]] += b.size
        return c

    def dumps(self) -> str:
        """One line per variable: ``<satvar> <family> <layer> <tag...> <index...>``."""
        out = io.StringIO()
        for b in self._blocks:
            head = " ".join(map(str, b.name))
            for off, idx in enumerate(np.ndindex(*b.shape) if b.shape else [()]):
                out.write(" ".join([str(b.start + off), head, *map(str, idx)]))
                out.write("\n")
        return out.getvalue()


# --- clause database ----------------------------------------------------------


@dataclass(frozen=True)
class EncodingStats:
    variables: int
    clauses: int
    literals: int

    @property
    def ratio(self) -> float:
        return self.clauses / self.variables if self.variables else float("nan")

    @property
    def mean_length(self) -> float:
        return self.literals / self.clauses if self.clauses else float("nan")


def _clean_rows(block: np.ndarray) -> tuple[np.ndarray, list[list[int]]]:
    """Split a uniform block into rows that need no cleanup and rows that do."""
    k = block.shape[1]
    if k < 2 or block.shape[0] == 0:
        return block, []
    # a repeated variable means a duplicate literal or a tautology; both need the slow path
    a = np.abs(block)
    if k <= 4:
        bad = np.zeros(block.shape[0], dtype=bool)
        for i in range(k):
            for j in range(i + 1, k):
                bad |= a[:, i] == a[:, j]
    else:
        a = np.sort(a, axis=1)
        bad = (a[:, 1:] == a[:, :-1]).any(axis=1)
    if not bad.any():
        return block, []
    return block[~bad], block[bad].tolist()


class Cnf:
    """Clause database over variables ``1..var_count``.

    Tautologies are dropped and duplicate literals collapsed at insertion.
    Every clause is tagged with the family active at insertion time
    (``with cnf.family(name): ...``) so tests can recount clause families.
    """

    def __init__(self, var_count: int = 0):
        self.var_count = var_count
        self._chunks: list[tuple[np.ndarray, np.ndarray]] = []
        self._pending: list[list[int]] = []
        self._family = "misc"
        self.family_counts: dict[str, Counter] = defaultdict(Counter)
        self.n_clauses = 0
        self.n_literals = 0

    @contextmanager
    def family(self, name: str):
        prev, self._family = self._family, name
        try:
            yield
        finally:
            self._family = prev

    def _count(self, arity: int, number: int = 1):
        self.family_counts[self._family][arity] += number
        self.n_clauses += number
        self.n_literals += arity * number

    def add(self, clause: Iterable[int]):
        lits = [int(x) for x in clause]
        seen = set(lits)
        if any(-x in seen for x in seen):
            return
        if len(seen) != len(lits):
            lits = list(dict.fromkeys(lits))
        self._check(lits)
        self._count(len(lits))
        self._store_single(lits)

    def add_block(self, block: np.ndarray):
        """Add every row of a 2-D literal array as a clause."""
        block = np.asarray(block, dtype=LIT_DTYPE)
        if block.ndim != 2:
            raise EncodingError("clause block must be 2-D")
        good, fixups = _clean_rows(block)
        if good.size:
            if (good == 0).any() or np.abs(good).max(initial=0) > self.var_count:
                raise EncodingError("literal out of range in clause block")
            self._count(good.shape[1], good.shape[0])
            self._store_block(good)
        elif good.shape[0] and good.shape[1] == 0:
            self._count(0, good.shape[0])
            self._store_block(good)
        for row in fixups:
            self.add(row)

    def add_units(self, lits: Iterable[int] | np.ndarray):
        self.add_block(np.asarray(lits, dtype=LIT_DTYPE).reshape(-1, 1))

    def _check(self, lits: list[int]):
        for x in lits:
            if x == 0 or abs(x) > self.var_count:
                raise EncodingError(f"literal {x} out of range 1..{self.var_count}")

    def _store_single(self, lits: list[int]):
        self._pending.append(lits)

    def _store_block(self, block: np.ndarray):
        self._flush()
        k = block.shape[1]
        offsets = np.arange(block.shape[0] + 1, dtype=np.int64) * k
        self._chunks.append((block.reshape(-1).copy(), offsets))

    def _flush(self):
        if not self._pending:
            return
        lens = np.fromiter((len(c) for c in self._pending), dtype=np.int64, count=len(self._pending))
        offsets = np.zeros(len(lens) + 1, dtype=np.int64)
        np.cumsum(lens, out=offsets[1:])
        flat = np.fromiter((x for c in self._pending for x in c), dtype=LIT_DTYPE, count=int(offsets[-1]))
        self._chunks.append((flat, offsets))
        self._pending = []

    # -- views

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """All clauses as ``(flat_literals, offsets)`` in insertion order."""
        self._flush()
        if not self._chunks:
            return np.zeros(0, dtype=LIT_DTYPE), np.zeros(1, dtype=np.int64)
        flats, offs, base = [], [np.zeros(1, dtype=np.int64)], 0
        for flat, o in self._chunks:
            flats.append(flat)
            offs.append(o[1:] + base)
            base += int(o[-1])
        return np.concatenate(flats), np.concatenate(offs)

    def clauses(self) -> Iterator[list[int]]:
        self._flush()
        for flat, o in self._chunks:
            for i in range(len(o) - 1):
                yield flat[o[i]:o[i + 1]].tolist()

    def __len__(self) -> int:
        return self.n_clauses

    def stats(self) -> EncodingStats:
        return EncodingStats(self.var_count, self.n_clauses, self.n_literals)

    def recount(self) -> EncodingStats:
        """Stats recomputed from the stored clauses, independent of the counters."""
        flat, offs = self.csr()
        return EncodingStats(self.var_count, len(offs) - 1, int(flat.size))

    def satisfied_by(self, model: np.ndarray) -> bool:
        """``model[v]`` is the truth value of variable v (index 0 unused)."""
        flat, offs = self.csr()
        if len(offs) == 1:
            return True
        if (np.diff(offs) == 0).any():
            return False
        model = np.asarray(model, dtype=bool)
        val = np.where(flat > 0, model[np.abs(flat)], ~model[np.abs(flat)])
        return bool((np.add.reduceat(val.astype(np.int64), offs[:-1]) > 0).all())


class CountingCnf(Cnf):
    """Keeps only counters; used for size studies of very large formulas."""

    def _store_single(self, lits):
        pass

    def _store_block(self, block):
        pass

    def _flush(self):
        self._pending = []

    def recount(self) -> EncodingStats:
        raise TypeError("CountingCnf stores no clauses")


# --- bit-vector gadgets -------------------------------------------------------


def _bits(c, width: int) -> np.ndarray:
    c = np.asarray(c, dtype=np.int64)
    if width and (c.min(initial=0) < 0 or c.max(initial=0) >= (1 << width)):
        raise EncodingError(f"constant out of range for width {width}")
    if not width and np.any(c != 0):
        raise EncodingError("width-0 vectors only hold 0")
    return (c[..., None] >> np.arange(width)) & 1


def const_eq(vec: np.ndarray, c) -> np.ndarray:
    """Literals whose conjunction says ``vec == c`` (shape ``(..., width)``)."""
    vec = np.asarray(vec, dtype=LIT_DTYPE)
    return np.where(_bits(c, vec.shape[-1]) == 1, vec, -vec)


def const_neq(vec: np.ndarray, c) -> np.ndarray:
    """One clause per leading index forbidding ``vec == c``."""
    vec = np.asarray(vec, dtype=LIT_DTYPE)
    if vec.shape[-1] == 0:
        raise TriviallyUnsat("cannot forbid the only value of a width-0 vector")
    return -const_eq(vec, c)


def var_eq(a: np.ndarray, b: np.ndarray, guard=None) -> np.ndarray:
    """Clauses (rows) for ``a == b`` bitwise, optionally under ``guard =>``.

    ``guard`` broadcasts against the bit arrays, e.g. shape ``(N, 1)``.
    """
    a = np.asarray(a, dtype=LIT_DTYPE)
    b = np.asarray(b, dtype=LIT_DTYPE)
    if a.shape[-1] != b.shape[-1]:
        raise EncodingError("width mismatch in var_eq")
    a, b = np.broadcast_arrays(a, b)
    pos = np.stack([-a, b], axis=-1)
    neg = np.stack([a, -b], axis=-1)
    cl = np.stack([pos, neg], axis=-2)  # (..., w, 2, 2)
    if guard is not None:
        g = np.broadcast_to(-np.asarray(guard, dtype=LIT_DTYPE)[..., None, None], cl.shape[:-1] + (1,))
        cl = np.concatenate([g, cl], axis=-1)
    return cl.reshape(-1, cl.shape[-1])


def var_neq(a: np.ndarray, b: np.ndarray, d: np.ndarray) -> list[np.ndarray]:
    """Clause blocks for ``a != b`` using per-bit difference witnesses ``d``.

    ``d[i]`` implies ``a[i] != b[i]``; one wide clause requires some witness.
    Returns ``[wide_block, ternary_block]``.  A width-0 request yields a single
    empty clause (both sides are the constant 0).
    """
    a = np.asarray(a, dtype=LIT_DTYPE)
    b = np.asarray(b, dtype=LIT_DTYPE)
    d = np.asarray(d, dtype=LIT_DTYPE)
    a, b, d = np.broadcast_arrays(a, b, d)
    w = a.shape[-1]
    lead = int(np.prod(a.shape[:-1], dtype=np.int64))
    if w == 0:
        return [np.zeros((lead, 0), dtype=LIT_DTYPE)]
    wide = d.reshape(-1, w)
    t1 = np.stack([-d, a, b], axis=-1)
    t2 = np.stack([-d, -a, -b], axis=-1)
    tern = np.stack([t1, t2], axis=-2).reshape(-1, 3)
    return [wide, tern]


def forbid_extra_states(vec: np.ndarray, domain_size: int) -> np.ndarray:
    """Clauses excluding the values ``domain_size .. 2**width - 1``."""
    vec = np.asarray(vec, dtype=LIT_DTYPE)
    w = vec.shape[-1]
    extra = range(domain_size, 1 << w)
    if not len(extra):
        return np.zeros((0, w), dtype=LIT_DTYPE)
    blocks = [const_neq(vec, c).reshape(-1, w) for c in extra]
    return np.stack(blocks, axis=-2).reshape(-1, w) if vec.ndim > 1 else np.concatenate(blocks)


# --- DIMACS -------------------------------------------------------------------


def write_dimacs(cnf: Cnf, out: io.TextIOBase | None = None) -> str | None:
    """Write ``cnf`` in DIMACS; returns the text when ``out`` is None."""
    buf = io.StringIO() if out is None else out
    buf.write(f"p cnf {cnf.var_count} {len(cnf)}\n")
    cnf._flush()
    for flat, offs in cnf._chunks:
        lens = np.diff(offs)
        if lens.size and (lens == lens[0]).all() and lens[0] > 0:
            k = int(lens[0])
            rows = flat.reshape(-1, k)
            fmt = " ".join(["%d"] * k) + " 0"
            buf.write("\n".join(fmt % tuple(r) for r in rows.tolist()))
            buf.write("\n")
        else:
            for i in range(len(offs) - 1):
                lits = flat[offs[i]:offs[i + 1]].tolist()
                buf.write(" ".join(map(str, lits + [0])) + "\n")
    return buf.getvalue() if out is None else None


def read_dimacs(text: str) -> Cnf:
    header = None
    lits: list[int] = []
    clauses: list[list[int]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            _, kind, nv, nc = line.split()
            header = (int(nv), int(nc))
            continue
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(lits)
                lits = []
            else:
                lits.append(x)
    if header is None:
        raise SolverProtocolError("missing 'p cnf' header")
    cnf = Cnf(header[0])
    for c in clauses:
        if c:
            cnf.add(c)
        else:
            cnf.add_block(np.zeros((1, 0), dtype=LIT_DTYPE))
    return cnf


def read_model(text: str, var_count: int | None = None) -> dict[int, bool] | None:
    """Parse SAT-competition solver output.

    Returns the model (unlisted variables false) or None for UNSAT.  Raises
    SolverProtocolError when no ``s`` line is present.
    """
    status = None
    lits: list[int] = []
    for line in text.splitlines():
        if line.startswith("s "):
            status = line[2:].strip()
        elif line.startswith("v "):
            lits.extend(int(t) for t in line[2:].split())
    if status is None:
        raise SolverProtocolError("solver output has no 's' line")
    if status == "UNSATISFIABLE":
        return None
    if status != "SATISFIABLE":
        raise SolverProtocolError(f"unexpected solver status {status!r}")
    model = {}
    if var_count is not None:
        model = {v: False for v in range(1, var_count + 1)}
    for x in lits:
        if x:
            model[abs(x)] = x > 0
    return model
