"""Random sampling with replacement over a stream of in-neighbors.

Each of a node's ``q`` slots is an independent uniform sample of the tails
seen so far. On the ``d``-th arrival every slot is overwritten with the new
tail with probability ``1/d`` independently, which keeps each slot uniform
over all ``d`` tails without knowing ``d`` in advance. Plain reservoir
sampling would couple the slots; this does not.
"""

from __future__ import annotations

import random
from typing import Hashable, List, Optional

SlotArray = List[Optional[Hashable]]


def new_slots(q: int) -> SlotArray:
    if q < 1:
        raise ValueError(f"q must be a positive integer, got {q}")
    return [None] * q


def observe(slots: SlotArray, tail: Hashable, current_degree: int, rng: random.Random) -> SlotArray:
    """Run one Bernoulli(1/current_degree) trial per slot, writing ``tail`` on success.

    ``current_degree`` is the owner's in-degree *after* counting this edge,
    so the first edge (degree 1) fills every slot. Consumes exactly
    ``len(slots)`` draws from ``rng``. Mutates and returns ``slots``.
    """
    if current_degree < 1:
        raise ValueError("current_degree must be >= 1; increment the degree before sampling")
    p = 1.0 / current_degree
    draw = rng.random
    for i in range(len(slots)):
        if draw() < p:
            slots[i] = tail
    return slots
