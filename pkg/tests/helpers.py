"""Shared instances for the test suite."""
from __future__ import annotations

import random

from cpfsat.bench import grid_graph
from cpfsat.model import CpfInstance

P3 = CpfInstance.build(3, [(0, 1), (1, 2)], [0], [2])
C4 = CpfInstance.build(4, [(0, 1), (1, 2), (2, 3), (3, 0)], [0, 1], [1, 2])
SWAP2_P2 = CpfInstance.build(2, [(0, 1)], [0, 1], [1, 0])
# two agents on disjoint 2-paths: both move in the same step
PARALLEL = CpfInstance.build(4, [(0, 1), (2, 3)], [0, 2], [1, 3])
HAND = {"P3": P3, "C4": C4, "SWAP2-P2": SWAP2_P2}


def random_grid_instance(seed: int) -> CpfInstance:
    """3x3 to 4x4 grid, 0-3 obstacles, 1-3 agents."""
    rng = random.Random(seed)
    w, h = rng.choice([3, 4]), rng.choice([3, 4])
    obstacles = rng.sample(range(w * h), rng.randint(0, 3))
    n, edges = grid_graph(w, h, obstacles)
    mu = rng.randint(1, 3)
    return CpfInstance.build(n, edges, rng.sample(range(n), mu), rng.sample(range(n), mu))


def corpus(count: int = 200, first_seed: int = 0) -> list[tuple[str, CpfInstance]]:
    items = [(f"grid-{s}", random_grid_instance(s)) for s in range(first_seed, first_seed + count)]
    return items + list(HAND.items())
