"""Deterministic random-stream derivation.

All stochastic code in the package draws from numpy Generators backed by the
counter-based Philox bit generator. Substreams are derived by hashing a base
seed together with integer path/cell indices, so a grid of jobs produces the
same numbers whether it runs serially or across any number of workers.
"""

from __future__ import annotations

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    """Return a Generator for the substream identified by ``(seed, *key)``.

    The same ``(seed, key)`` always yields the same stream; distinct keys
    yield statistically independent streams.
    """
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    entropy = (int(seed),) + tuple(int(k) for k in key)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
