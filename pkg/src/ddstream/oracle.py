"""Exact diffusion degree over a fully retained multigraph.

This is the ground truth the sketch is measured against, so it keeps every
edge. Neighborhoods are multisets: a parallel edge contributes its tail's
degree once per copy, matching the sketch's counters.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .stream import EdgeEvent


@dataclass
class StaticGraph:
    in_adj: dict = field(default_factory=lambda: defaultdict(list))
    in_degree: dict = field(default_factory=lambda: defaultdict(int))
    nodes: dict = field(default_factory=dict)  # insertion-ordered node set
    edges: list = field(default_factory=list)  # (tail, head) in stream order

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def avg_in_degree(self) -> float:
        return self.m / self.n if self.n else 0.0

    def add_edge(self, tail: Hashable, head: Hashable) -> None:
        self.nodes.setdefault(tail, None)
        self.nodes.setdefault(head, None)
        self.in_adj[head].append(tail)
        self.in_degree[head] += 1
        self.edges.append((tail, head))

    def degree(self, u: Hashable) -> int:
        return self.in_degree.get(u, 0)

    def __contains__(self, u):
        return u in self.nodes


def build(events: Iterable[EdgeEvent]) -> StaticGraph:
    g = StaticGraph()
    for ev in events:
        g.add_edge(ev.tail, ev.head)
    return g


def exact_dd(g: StaticGraph, u: Hashable, lam: float) -> float:
    """``lam * (d_u + sum of the in-degrees of u's in-neighbors)``; 0 if unknown."""
    d = g.in_degree.get(u, 0)
    if d == 0:
        return 0.0
    deg = g.in_degree
    return lam * (d + sum(deg.get(v, 0) for v in g.in_adj[u]))


def neighbor_degree_bounds(g: StaticGraph, u: Hashable) -> tuple[int, int]:
    """``(a_u, b_u)``: min and max in-degree over u's in-neighbors."""
    if g.in_degree.get(u, 0) == 0:
        raise ValueError(f"node {u!r} has no in-neighbors; degree bounds are undefined")
    degs = [g.in_degree.get(v, 0) for v in g.in_adj[u]]
    return min(degs), max(degs)


def _tie_key(node):
    # ids may be mixed types after external labelling; compare within type first
    return (type(node).__name__, node)


def exact_topk(g: StaticGraph, k: int, lam: float) -> list[tuple[Hashable, float]]:
    """Top ``k`` nodes by exact diffusion degree, ties to the lower id."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    scored = [(u, exact_dd(g, u, lam)) for u in g.nodes]
    scored.sort(key=lambda t: (-t[1], _tie_key(t[0])))
    return scored[:k]
