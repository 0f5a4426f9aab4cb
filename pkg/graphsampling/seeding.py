"""
Seeded random streams.

Every random quantity is drawn from a counter-based `Philox` generator, so
results depend only on the seeds and never on evaluation order.
"""

from __future__ import annotations

import numpy as np

SeedLike = int | np.random.SeedSequence | None


def make_generator(seed: SeedLike = None) -> np.random.Generator:
    """
    A `numpy` generator backed by `Philox`.
    """
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def derived_seed(seed: int, *path: int) -> np.random.SeedSequence:
    """
    A seed sequence that only depends on `seed` and the integer `path`, e.g.
    the indices of a point of a parameter sweep.

    Example
    -------
    >>> a = make_generator(derived_seed(7, 2, 3)).random()
    >>> b = make_generator(derived_seed(7, 2, 3)).random()
    >>> a == b
    True
    """
    return np.random.SeedSequence(seed, spawn_key=tuple(path))


def spawn_generators(seed: SeedLike, count: int) -> list[np.random.Generator]:
    """
    `count` independent generators, e.g. one per vertex.
    """
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return [make_generator(child) for child in seed.spawn(count)]
