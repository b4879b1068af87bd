"""Seeded, splittable random streams.

All randomness flows through numpy Generators built on PCG64. Parallel work
(start vertices, trials, sample batches) gets child streams from spawn(), so
results do not depend on scheduling.
"""

from typing import List, Union

import numpy as np

SeedLike = Union[int, np.random.Generator, None]


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    """Return a Generator for an int seed, pass Generators through unchanged."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn(rng: np.random.Generator, count: int) -> List[np.random.Generator]:
    """Independent child streams, deterministic given the parent's seed."""
    return rng.spawn(count)


def trial_seed(seed_base: int, trial_index: int) -> int:
    """Seed of trial i in an experiment: seed_base + i."""
    return int(seed_base) + int(trial_index)


def trial_rng(seed: int, cell_index: int) -> np.random.Generator:
    """Tester stream of one trial, distinct from the instance seed and per grid cell."""
    return np.random.default_rng([int(seed), int(cell_index), 1])
