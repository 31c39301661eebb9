"""Embedded DPLL with two-watched-literal unit propagation.

No learning, no restarts.  Branching takes the lowest-index unassigned
variable and tries FALSE first; backtracking is chronological.  The search
state lives in flat integer arrays so the kernel can be paused after a
conflict budget and resumed, which is how wall-clock limits are enforced.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .._accel import HAS_NUMBA, jit

SAT, UNSAT, PAUSED = 10, 20, 0

# st[] slots
_LEVEL, _QHEAD, _TRAIL_LEN, _NEXT_VAR, _CONFLICTS = range(5)


def _run(nvars, lits, cstart, wstart, wlen, wbuf, val, trail, lim, dec, flipped, st, budget):
    """Advance the search by at most ``budget`` conflicts.

    Literal codes: ``2 * var + neg`` with 0-based vars; ``val[var]`` is -1
    (unassigned), 0 or 1.  Returns SAT, UNSAT or PAUSED.
    """
    level = st[0]
    qhead = st[1]
    tlen = st[2]
    nxt = st[3]
    spent = 0
    while True:
        # unit propagation
        conflict = False
        while qhead < tlen and not conflict:
            p = trail[qhead]
            qhead += 1
            fl = p ^ 1
            ws = wstart[fl]
            n = wlen[fl]
            i = 0
            while i < n:
                c = wbuf[ws + i]
                cs = cstart[c]
                ce = cstart[c + 1]
                if lits[cs] == fl:
                    lits[cs] = lits[cs + 1]
                    lits[cs + 1] = fl
                first = lits[cs]
                fv = val[first >> 1]
                if fv >= 0 and fv == ((first & 1) ^ 1):
                    i += 1
                    continue
                moved = False
                for k in range(cs + 2, ce):
                    q = lits[k]
                    qv = val[q >> 1]
                    if qv < 0 or qv == ((q & 1) ^ 1):
                        lits[cs + 1] = q
                        lits[k] = fl
                        wbuf[wstart[q] + wlen[q]] = c
                        wlen[q] += 1
                        n -= 1
                        wbuf[ws + i] = wbuf[ws + n]
                        moved = True
                        break
                if moved:
                    continue
                if fv >= 0:
                    conflict = True
                    break
                val[first >> 1] = (first & 1) ^ 1
                trail[tlen] = first
                tlen += 1
                i += 1
            wlen[fl] = n

        if conflict:
            spent += 1
            st[4] += 1
            while level > 0 and flipped[level - 1] == 1:
                level -= 1
                while tlen > lim[level]:
                    tlen -= 1
                    val[trail[tlen] >> 1] = -1
            if level == 0:
                st[0] = level
                st[1] = qhead
                st[2] = tlen
                st[3] = nxt
                return 20
            d = dec[level - 1]
            while tlen > lim[level - 1]:
                tlen -= 1
                val[trail[tlen] >> 1] = -1
            flipped[level - 1] = 1
            d = d ^ 1
            val[d >> 1] = (d & 1) ^ 1
            trail[tlen] = d
            tlen += 1
            qhead = tlen - 1
            nxt = d >> 1
            if spent >= budget:
                st[0] = level
                st[1] = qhead
                st[2] = tlen
                st[3] = nxt
                return 0
            continue

        while nxt < nvars and val[nxt] >= 0:
            nxt += 1
        if nxt == nvars:
            st[0] = level
            st[1] = qhead
            st[2] = tlen
            st[3] = nxt
            return 10
        d = 2 * nxt + 1  # negative literal: FALSE first
        lim[level] = tlen
        dec[level] = d
        flipped[level] = 0
        level += 1
        val[nxt] = 0
        trail[tlen] = d
        tlen += 1


_run_fast = jit(_run)


@dataclass
class DpllResult:
    status: int  # SAT / UNSAT / PAUSED (timeout)
    model: np.ndarray | None  # bool array, index 0 unused
    conflicts: int


class Dpll:
    """Prepared solver state for one CNF (``flat``/``offsets`` CSR, signed literals)."""

    def __init__(self, nvars: int, flat: np.ndarray, offsets: np.ndarray, use_numba: bool | None = None):
        self.nvars = nvars
        self.use_numba = HAS_NUMBA if use_numba is None else (use_numba and HAS_NUMBA)
        flat = np.asarray(flat, dtype=np.int64)
        offsets = np.asarray(offsets, dtype=np.int64)
        lens = np.diff(offsets)
        self.trivial = None
        codes = 2 * (np.abs(flat) - 1) + (flat < 0)

        val = np.full(max(nvars, 1), -1, dtype=np.int64)
        trail = np.zeros(max(nvars, 1), dtype=np.int64)
        tlen = 0
        if (lens == 0).any():
            self.trivial = UNSAT
        # unit clauses are assigned up front at level 0
        for c in np.nonzero(lens == 1)[0].tolist():
            lit = int(codes[offsets[c]])
            v, want = lit >> 1, (lit & 1) ^ 1
            if val[v] < 0:
                val[v] = want
                trail[tlen] = lit
                tlen += 1
            elif val[v] != want:
                self.trivial = UNSAT

        keep = lens >= 2
        klens = lens[keep]
        cstart = np.zeros(len(klens) + 1, dtype=np.int64)
        np.cumsum(klens, out=cstart[1:])
        take = np.repeat(keep, lens)
        lits = codes[take].astype(np.int64)

        nlits = 2 * max(nvars, 1)
        occ = np.bincount(lits, minlength=nlits) if lits.size else np.zeros(nlits, dtype=np.int64)
        wstart = np.zeros(nlits + 1, dtype=np.int64)
        np.cumsum(occ, out=wstart[1:])
        wbuf = np.zeros(max(int(wstart[-1]), 1), dtype=np.int64)
        wlen = np.zeros(nlits, dtype=np.int64)
        nclauses = len(klens)
        if nclauses:
            w0 = lits[cstart[:-1]]
            w1 = lits[cstart[:-1] + 1]
            for col in (w0, w1):
                order = np.argsort(col, kind="stable")
                sorted_lits = col[order]
                counts = np.bincount(sorted_lits, minlength=nlits)
                first = np.zeros(nlits, dtype=np.int64)
                np.cumsum(counts[:-1], out=first[1:])
                rank = np.arange(nclauses) - first[sorted_lits]
                wbuf[wstart[sorted_lits] + wlen[sorted_lits] + rank] = order
                wlen += counts

        self.arrays = dict(
            lits=lits, cstart=cstart, wstart=wstart, wlen=wlen, wbuf=wbuf, val=val, trail=trail,
            lim=np.zeros(max(nvars, 1) + 1, dtype=np.int64),
            dec=np.zeros(max(nvars, 1) + 1, dtype=np.int64),
            flipped=np.zeros(max(nvars, 1) + 1, dtype=np.int64),
            st=np.array([0, 0, tlen, 0, 0], dtype=np.int64),
        )
        if not self.use_numba:
            # plain lists index far faster than numpy scalars in CPython
            self.arrays = {k: v.tolist() for k, v in self.arrays.items()}

    def solve(self, time_limit: float | None = None, chunk: int = 50_000,
              max_conflicts: int | None = None) -> DpllResult:
        """Run to a verdict, or return PAUSED once a limit is reached."""
        if self.trivial is not None:
            return DpllResult(self.trivial, None, 0)
        a = self.arrays
        kernel = _run_fast if self.use_numba else getattr(_run_fast, "py_func", _run)
        deadline = None if time_limit is None else time.monotonic() + time_limit
        while True:
            step = chunk if max_conflicts is None else max(1, min(chunk, max_conflicts - int(a["st"][4])))
            status = kernel(
                self.nvars, a["lits"], a["cstart"], a["wstart"], a["wlen"], a["wbuf"], a["val"],
                a["trail"], a["lim"], a["dec"], a["flipped"], a["st"], step,
            )
            conflicts = int(a["st"][4])
            if status == SAT:
                model = np.zeros(self.nvars + 1, dtype=bool)
                model[1:] = np.asarray(a["val"][: self.nvars]) == 1
                return DpllResult(SAT, model, conflicts)
            if status == UNSAT:
                return DpllResult(UNSAT, None, conflicts)
            if deadline is not None and time.monotonic() >= deadline:
                return DpllResult(PAUSED, None, conflicts)
            if max_conflicts is not None and conflicts >= max_conflicts:
                return DpllResult(PAUSED, None, conflicts)


def dpll(nvars: int, flat: np.ndarray, offsets: np.ndarray, *, time_limit: float | None = None,
         use_numba: bool | None = None) -> DpllResult:
    return Dpll(nvars, flat, offsets, use_numba=use_numba).solve(time_limit)
