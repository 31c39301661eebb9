from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpfsat.cnf import (Cnf, CountingCnf, EncodingError, SolverProtocolError, TriviallyUnsat, VarMap,
                        bit_width, const_eq, const_neq, forbid_extra_states, read_dimacs, read_model,
                        var_eq, var_neq, write_dimacs)


def rows(block) -> list[list[int]]:
    return np.asarray(block).reshape(-1, np.asarray(block).shape[-1]).tolist()


def holds(clauses, assign: dict[int, bool]) -> bool:
    return all(any(assign[abs(x)] == (x > 0) for x in c) for c in clauses)


def value(bits, assign) -> int:
    return sum(1 << i for i, b in enumerate(bits) if assign[b])


def parse_dimacs_independently(text: str) -> tuple[int, list[list[int]]]:
    tokens = [t for line in text.splitlines() if not line.startswith(("c", "p")) for t in line.split()]
    header = next(line for line in text.splitlines() if line.startswith("p"))
    clauses, cur = [], []
    for t in map(int, tokens):
        if t == 0:
            clauses.append(cur)
            cur = []
        else:
            cur.append(t)
    return int(header.split()[2]), clauses


@pytest.mark.parametrize("domain,width", [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4)])
def test_bit_width(domain, width):
    assert bit_width(domain) == width


class TestConstants:
    def test_const_eq_examples(self):
        vec = np.array([1, 2, 3])
        assert const_eq(vec, 3).tolist() == [1, 2, -3]
        assert const_eq(vec, 0).tolist() == [-1, -2, -3]
        assert const_eq(np.zeros(0, dtype=np.int64), 0).tolist() == []

    def test_const_eq_out_of_range(self):
        with pytest.raises(EncodingError):
            const_eq(np.array([1, 2]), 4)

    @pytest.mark.parametrize("width,c,clause", [(2, 2, [1, -2]), (1, 1, [-1]), (2, 0, [1, 2])])
    def test_const_neq_examples(self, width, c, clause):
        assert const_neq(np.arange(1, width + 1), c).tolist() == clause

    def test_const_neq_width_zero(self):
        with pytest.raises(TriviallyUnsat):
            const_neq(np.zeros(0, dtype=np.int64), 0)

    @pytest.mark.parametrize("domain,width,count", [(5, 3, 3), (4, 2, 0), (1, 0, 0)])
    def test_forbid_extra_states_counts(self, domain, width, count):
        assert len(forbid_extra_states(np.arange(1, width + 1), domain)) == count

    @pytest.mark.parametrize("width", [1, 2, 3])
    def test_exhaustive_equivalence(self, width):
        bits = list(range(1, width + 1))
        for c in range(1 << width):
            eq_lits = const_eq(np.array(bits), c).tolist()
            neq = [const_neq(np.array(bits), c).tolist()]
            for domain in range(1, (1 << width) + 1):
                extra = rows(forbid_extra_states(np.array(bits), domain)) if domain < (1 << width) else []
                for combo in itertools.product([False, True], repeat=width):
                    assign = dict(zip(bits, combo))
                    v = value(bits, assign)
                    assert all(assign[abs(x)] == (x > 0) for x in eq_lits) == (v == c)
                    assert holds(neq, assign) == (v != c)
                    assert holds(extra, assign) == (v < domain)


class TestVectorRelations:
    def test_var_eq_counts(self):
        assert var_eq(np.array([1, 2]), np.array([3, 4])).shape == (4, 2)
        assert var_eq(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)).shape[0] == 0

    def test_var_eq_guard_clauses(self):
        cl = rows(var_eq(np.array([2]), np.array([3]), guard=np.array([1])))
        assert sorted(map(sorted, cl)) == sorted([sorted([-1, -2, 3]), sorted([-1, 2, -3])])

    def test_var_eq_width_mismatch(self):
        with pytest.raises(EncodingError):
            var_eq(np.array([1]), np.array([2, 3]))

    @pytest.mark.parametrize("width", [1, 2, 3])
    def test_var_eq_exhaustive(self, width):
        a = list(range(1, width + 1))
        b = list(range(width + 1, 2 * width + 1))
        g = 2 * width + 1
        plain = rows(var_eq(np.array(a), np.array(b)))
        guarded = rows(var_eq(np.array(a), np.array(b), guard=np.array([g])))
        for combo in itertools.product([False, True], repeat=2 * width + 1):
            assign = dict(zip(a + b + [g], combo))
            same = value(a, assign) == value(b, assign)
            assert holds(plain, assign) == same
            assert holds(guarded, assign) == (same or not assign[g])

    @pytest.mark.parametrize("width", [1, 2, 3])
    def test_var_neq_shape(self, width):
        a, b = np.arange(1, width + 1), np.arange(width + 1, 2 * width + 1)
        d = np.arange(2 * width + 1, 3 * width + 1)
        wide, tern = var_neq(a, b, d)
        assert wide.shape == (1, width)
        assert tern.shape == (2 * width, 3)

    @pytest.mark.parametrize("width", [1, 2, 3])
    def test_var_neq_exhaustive(self, width):
        a = list(range(1, width + 1))
        b = list(range(width + 1, 2 * width + 1))
        d = list(range(2 * width + 1, 3 * width + 1))
        clauses = [c for block in var_neq(np.array(a), np.array(b), np.array(d)) for c in rows(block)]
        for combo in itertools.product([False, True], repeat=2 * width):
            base = dict(zip(a + b, combo))
            differs = value(a, base) != value(b, base)
            extendable = any(holds(clauses, {**base, **dict(zip(d, ds))})
                             for ds in itertools.product([False, True], repeat=width))
            assert extendable == differs

    def test_var_neq_width_zero_is_empty_clause(self):
        empty = np.zeros((3, 0), dtype=np.int64)
        blocks = var_neq(empty, empty, empty)
        assert len(blocks) == 1 and blocks[0].shape == (3, 0)


class TestCnf:
    def test_tautology_and_duplicates(self):
        cnf = Cnf(3)
        cnf.add([1, -1, 2])
        cnf.add([2, 2, 3])
        cnf.add_block(np.array([[1, -1], [3, 3], [1, 2]]))
        assert sorted(cnf.clauses()) == [[1, 2], [2, 3], [3]]
        assert cnf.stats() == cnf.recount()

    def test_out_of_range(self):
        cnf = Cnf(2)
        with pytest.raises(EncodingError):
            cnf.add([3])
        with pytest.raises(EncodingError):
            cnf.add_block(np.array([[1, 0]]))

    def test_family_counts(self):
        cnf = Cnf(4)
        with cnf.family("x"):
            cnf.add_block(np.array([[1, 2, 3], [2, 3, 4]]))
            cnf.add([1])
        assert cnf.family_counts["x"] == {3: 2, 1: 1}

    def test_counting_matches_full(self):
        rng = np.random.default_rng(0)
        full, counting = Cnf(6), CountingCnf(6)
        for _ in range(20):
            k = int(rng.integers(1, 4))
            block = rng.integers(1, 7, size=(5, k)) * rng.choice([-1, 1], size=(5, k))
            full.add_block(block)
            counting.add_block(block)
        assert full.stats() == counting.stats() == full.recount()

    def test_satisfied_by(self):
        cnf = Cnf(2)
        cnf.add([1, 2])
        cnf.add([-1])
        assert cnf.satisfied_by(np.array([False, False, True]))
        assert not cnf.satisfied_by(np.array([False, True, False]))
        cnf.add_block(np.zeros((1, 0), dtype=np.int64))
        assert not cnf.satisfied_by(np.array([False, False, True]))


class TestVarMap:
    def test_keys_round_trip(self):
        vm = VarMap()
        a = vm.alloc("A", 0, (3, 2))
        t = vm.alloc("T", 0, 2, tag=(1,))
        assert vm[("A", 0, 2, 1)] == a[2, 1]
        assert vm.key(int(t[1])) == ("T", 0, 1, 1)
        assert ("A", 0, 5, 0) not in vm
        assert vm.dumps().splitlines()[0] == "1 A 0 0 0"

    def test_double_allocation(self):
        vm = VarMap()
        vm.alloc("A", 0, 2)
        with pytest.raises(EncodingError):
            vm.alloc("A", 0, 2)


class TestDimacs:
    def test_write_example(self):
        cnf = Cnf(2)
        cnf.add([1, -2])
        cnf.add([2])
        assert write_dimacs(cnf) == "p cnf 2 2\n1 -2 0\n2 0\n"

    def test_read_model(self):
        assert read_model("s SATISFIABLE\nv 1 -2 0\n") == {1: True, 2: False}
        assert read_model("c hi\ns UNSATISFIABLE\n") is None
        assert read_model("s SATISFIABLE\nv 2 0\n", 3) == {1: False, 2: True, 3: False}
        with pytest.raises(SolverProtocolError):
            read_model("")
        with pytest.raises(SolverProtocolError):
            read_model("v 1 0\n")

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.lists(st.integers(-6, 6).filter(bool), min_size=1, max_size=4), max_size=15))
    def test_round_trip(self, clauses):
        cnf = Cnf(6)
        for c in clauses:
            cnf.add(c)
        text = write_dimacs(cnf)
        nv, parsed = parse_dimacs_independently(text)
        assert nv == 6
        assert sorted(parsed) == sorted(cnf.clauses())
        assert write_dimacs(read_dimacs(text)) == text
