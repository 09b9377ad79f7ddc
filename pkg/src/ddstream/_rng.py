"""Deterministic seed derivation shared by every stochastic component."""

import numpy as np


def derive_seed(base: int, *keys: int) -> int:
    """Return a 64-bit seed derived from ``base`` and an integer key path.

    Derived streams depend only on ``(base, keys)``, never on call order, so
    independent runs can be scheduled in any order (or in parallel) and still
    reproduce the same results.
    """
    entropy = [int(base) & 0xFFFFFFFFFFFFFFFF, *(int(k) for k in keys)]
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 32) | int(state[1])
