"""Seed plumbing for reproducible simulations.

Population runs derive one independent stream per learner from a master
seed, so results are identical regardless of execution order or threading.
"""

from __future__ import annotations

from typing import Union

import numpy as np

SeedLike = Union[int, np.random.Generator, np.random.SeedSequence, None]


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Pass generators through; wrap ints/SeedSequences; None means fresh entropy."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_generators(master_seed: int, n: int) -> list[np.random.Generator]:
    """n independent, reproducible streams derived from one master seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(master_seed).spawn(n)]
