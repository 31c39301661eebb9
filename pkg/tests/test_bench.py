from __future__ import annotations

import csv
import io

import pytest

from cpfsat.bench import (RUN_AGG_FIELDS, SIZE_AGG_FIELDS, SIZE_FIELDS, BenchReport, GridSpec,
                          filter_solvable, generate_grid_instance, grid_graph, move_differences,
                          runtime_study, size_study, solvable_instances, write_suite)
from cpfsat.driver import DriverConfig
from cpfsat.encodings import EncodingKind
from cpfsat.model import InputError, read_instance
from cpfsat.satsolver import SolverConfig
from helpers import SWAP2_P2, P3

LIB = DriverConfig(solver=SolverConfig("library"))


class TestGeneration:
    @pytest.mark.parametrize("w,h,obst,verts", [(4, 4, 3, 13), (6, 6, 7, 29), (8, 8, 12, 52), (16, 16, 51, 205)])
    def test_obstacle_counts(self, w, h, obst, verts):
        spec = GridSpec(w, h, 1)
        assert spec.obstacle_count == obst
        assert generate_grid_instance(spec).n == verts

    @pytest.mark.parametrize("w,h", [(1, 1), (2, 3), (5, 4)])
    def test_full_grid_edges(self, w, h):
        n, edges = grid_graph(w, h)
        assert n == w * h and len(edges) == 2 * w * h - w - h

    def test_obstacle_removes_edges(self):
        n, edges = grid_graph(3, 3, [4])
        assert n == 8 and len(edges) == 8

    @pytest.mark.parametrize("seed", [0, 7, 123])
    def test_deterministic(self, seed):
        spec = GridSpec(6, 6, 5, seed)
        assert generate_grid_instance(spec) == generate_grid_instance(spec)

    def test_seeds_differ(self):
        assert generate_grid_instance(GridSpec(6, 6, 5, 0)) != generate_grid_instance(GridSpec(6, 6, 5, 1))

    @pytest.mark.parametrize("kw", [dict(width=0), dict(agent_count=14), dict(obstacle_fraction=1.0)])
    def test_invalid_spec(self, kw):
        base = dict(width=4, height=4, agent_count=2)
        with pytest.raises(InputError):
            GridSpec(**{**base, **kw})

    def test_write_suite(self, tmp_path):
        specs = [GridSpec(4, 4, 2, s) for s in range(3)]
        paths = write_suite(specs, tmp_path)
        assert paths[1] == tmp_path / "4x4" / "mu2" / "seed1.cpf"
        assert read_instance(paths[2].read_text()) == generate_grid_instance(specs[2])


class TestFiltering:
    def test_examples(self):
        assert filter_solvable(P3)
        assert not filter_solvable(SWAP2_P2)

    def test_driver_path(self):
        assert filter_solvable(P3, oracle_states=1, driver=LIB)

    def test_solvable_instances_skip_rejects(self):
        got = solvable_instances(GridSpec(4, 4, 3), 5)
        assert len(got) == 5
        seeds = [s for s, _ in got]
        assert seeds == sorted(set(seeds)) and seeds[0] >= 0
        for seed in range(seeds[-1] + 1):
            inst = generate_grid_instance(GridSpec(4, 4, 3, seed))
            assert (seed in seeds) == filter_solvable(inst)


class TestSizeStudy:
    def test_rows_and_aggregates(self):
        kinds = [EncodingKind.DIRECT, EncodingKind.MATCHING]
        rep = size_study([GridSpec(4, 4, 2)], kinds, {"4x4": 5}, seeds=3)
        assert len(rep.rows) == 6
        assert rep.aggregates == rep.recompute()
        for agg in rep.aggregates:
            group = [r for r in rep.rows if r["encoding"] == agg["encoding"]]
            assert agg["instances"] == 3
            assert agg["#Variables"] == pytest.approx(sum(r["variables"] for r in group) / 3)
            assert agg["Ratio"] == pytest.approx(sum(r["clauses"] for r in group) / sum(r["variables"] for r in group))
            assert agg["Length"] == pytest.approx(sum(r["literals"] for r in group) / sum(r["clauses"] for r in group))

    def test_csv_columns(self):
        rep = size_study([GridSpec(4, 4, 1)], [EncodingKind.INVERSE], {"4x4": 3}, seeds=2)
        rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
        assert list(rows[0]) == SIZE_FIELDS and len(rows) == 2
        agg = list(csv.DictReader(io.StringIO(rep.to_csv(aggregates=True))))
        assert list(agg[0]) == SIZE_AGG_FIELDS

    def test_zero_agents(self):
        rep = size_study([GridSpec(4, 4, 0)], list(EncodingKind), {"4x4": 2}, seeds=1)
        assert all(r["clauses"] >= 0 for r in rep.rows)
        assert len(rep.aggregates) == len(EncodingKind)


class TestRuntimeStudy:
    def test_small_run(self):
        kinds = [EncodingKind.SIMPLIFIED, EncodingKind.MATCHING]
        rep = runtime_study(GridSpec(4, 4, 1), [1, 2], kinds, LIB, seeds=3)
        assert len(rep.rows) == 12
        assert all(r["status"] == "optimal" for r in rep.rows)
        agg = list(csv.DictReader(io.StringIO(rep.to_csv(aggregates=True))))
        assert list(agg[0]) == RUN_AGG_FIELDS
        # both encodings find optimal plans, so makespans agree per instance
        by = {}
        for r in rep.rows:
            by.setdefault((r["mu"], r["seed"]), set()).add(r["makespan"])
        assert all(len(v) == 1 for v in by.values())
        diffs = move_differences(rep)
        assert len(diffs) == 6 and all(d["encoding"] == "matching" for d in diffs)
        assert [d["difference"] for d in diffs] == sorted(d["difference"] for d in diffs)

    def test_censoring_drops_encoding(self):
        tight = DriverConfig(solver=SolverConfig("library"), eta_cap=1)
        rep = runtime_study(GridSpec(4, 4, 1), [2, 3], [EncodingKind.DIRECT], tight, seeds=4)
        assert {r["mu"] for r in rep.rows} == {2}
        assert rep.aggregates[0]["censored"] is True

    def test_empty_report_csv(self):
        assert BenchReport("runtime").to_csv().strip() == ",".join(
            ["grid", "mu", "seed", "encoding", "status", "seconds", "makespan", "total_moves"])
