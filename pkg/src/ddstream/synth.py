"""Deterministic synthetic edge streams.

Node ids are integers. Edges are ``(tail, head)``; in-degree means the number
of events with the node as head.

* ``star(h)``: leaves ``1..h`` each send one edge to center ``0``.
  In-degree of 0 is ``h``; leaves have 0.
* ``cycle(n)``: edges ``(i, i+1 mod n)``. Every node has in-degree 1.
* ``path(n)``: edges ``(i, i+1)`` for ``i < n-1``. Node 0 has in-degree 0,
  every other node 1.
* ``two_tier_hub(h, b)``: hub ``0`` with in-neighbors ``1..h``. Neighbor
  ``i`` (``i = 1..h``) has in-degree ``1 + (i-1)(b-1) // (h-1)`` from its own
  fresh leaves, so the neighbor degrees run from 1 up to ``b``. Leaves have
  in-degree 0. Leaf edges come first, hub edges last.
* ``heavy_tail(n, r)``: node ``t = 1..n-1`` sends ``r`` edges to earlier
  nodes, each head drawn with probability proportional to
  ``1 + in-degree`` (parallel edges possible). ``m = (n-1) r``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .stream import EdgeEvent

KINDS = ("star", "cycle", "path", "two-tier-hub", "heavy-tail")


def _events(pairs) -> list[EdgeEvent]:
    return [EdgeEvent(t, h, i) for i, (t, h) in enumerate(pairs)]


def star(h: int) -> list[EdgeEvent]:
    if h < 1:
        raise ValueError("star needs h >= 1")
    return _events((i, 0) for i in range(1, h + 1))


def cycle(n: int) -> list[EdgeEvent]:
    if n < 1:
        raise ValueError("cycle needs n >= 1")
    return _events((i, (i + 1) % n) for i in range(n))


def path(n: int) -> list[EdgeEvent]:
    if n < 1:
        raise ValueError("path needs n >= 1")
    return _events((i, i + 1) for i in range(n - 1))


def two_tier_degrees(h: int, b: int) -> list[int]:
    if h == 1:
        return [b]
    return [1 + (i * (b - 1)) // (h - 1) for i in range(h)]


def two_tier_hub(h: int = 8, b: int = 6) -> list[EdgeEvent]:
    if h < 1 or b < 1:
        raise ValueError("two-tier-hub needs h >= 1 and b >= 1")
    pairs = []
    leaf = h + 1
    for i, deg in enumerate(two_tier_degrees(h, b), start=1):
        for _ in range(deg):
            pairs.append((leaf, i))
            leaf += 1
    pairs.extend((i, 0) for i in range(1, h + 1))
    return _events(pairs)


def heavy_tail(n: int, r: int = 3, seed: int = 0) -> list[EdgeEvent]:
    if n < 2 or r < 1:
        raise ValueError("heavy-tail needs n >= 2 and r >= 1")
    rng = random.Random(seed)
    # node x appears 1 + in_degree(x) times, so a uniform pick is proportional to that
    urn = [0]
    pairs = []
    for t in range(1, n):
        heads = [urn[rng.randrange(len(urn))] for _ in range(r)]
        for h in heads:
            pairs.append((t, h))
        urn.extend(heads)
        urn.append(t)
    return _events(pairs)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0


def generate(spec: GeneratorSpec) -> list[EdgeEvent]:
    p = dict(spec.params)
    if spec.kind == "star":
        return star(p.get("h", 3))
    if spec.kind == "cycle":
        return cycle(p.get("n", 3))
    if spec.kind == "path":
        return path(p.get("n", 3))
    if spec.kind == "two-tier-hub":
        return two_tier_hub(p.get("h", 8), p.get("b", 6))
    if spec.kind == "heavy-tail":
        return heavy_tail(p.get("n", 1000), p.get("r", 3), spec.seed)
    raise ValueError(f"unknown generator kind {spec.kind!r}; expected one of {KINDS}")
