"""Statistical checks on the sketch: error bounds, mean error, space, timing."""

from __future__ import annotations

import math
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Hashable, Iterable, Optional, Sequence

from ._rng import derive_seed
from .oracle import StaticGraph, exact_dd, neighbor_degree_bounds
from .sketch import AdjSketch


def q_for(epsilon: float, delta: float) -> int:
    """Smallest q with ``2 * exp(-2 q epsilon^2) <= delta``."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")

    def ok(q):
        return 2.0 * math.exp(-2.0 * q * epsilon * epsilon) <= delta

    q = max(1, math.ceil(math.log(2.0 / delta) / (2.0 * epsilon * epsilon)))
    # the closed form can land one off after rounding; settle it on the inequality itself
    while q > 1 and ok(q - 1):
        q -= 1
    while not ok(q):
        q += 1
    return q


def hoeffding_slack(delta: float, trials: int) -> float:
    """Allowed empirical violation rate: delta plus three binomial standard errors."""
    return delta + 3.0 * math.sqrt(delta * (1.0 - delta) / trials)


@dataclass
class BoundCheckResult:
    node: Hashable
    q_used: int
    epsilon: float
    delta: float
    trials: int
    violations: int
    empirical_rate: float
    bound_per_node: dict
    degenerate: bool = False
    max_abs_error: float = 0.0

    @property
    def threshold(self) -> float:
        return hoeffding_slack(self.delta, self.trials)

    @property
    def passed(self) -> bool:
        return self.degenerate or self.empirical_rate <= self.threshold

    def to_dict(self) -> dict:
        out = asdict(self)
        out["bound_per_node"] = {str(k): v for k, v in self.bound_per_node.items()}
        out["threshold"] = self.threshold
        out["passed"] = self.passed
        return out


def hoeffding_validate(
    g: StaticGraph,
    u: Hashable,
    epsilon: float,
    delta: float,
    trials: int = 20_000,
    lam: float = 0.1,
    base_seed: int = 0,
) -> BoundCheckResult:
    """Rebuild the sketch ``trials`` times and count bound violations at ``u``.

    A violation is ``|query(u) - exact_dd(u)| > epsilon (b_u - a_u) d_u lam``
    with q from :func:`q_for`. Trial ``i`` uses a seed derived from
    ``(base_seed, i)``. When every in-neighbor of ``u`` has the same degree
    the radius is zero; such nodes are flagged ``degenerate`` and their
    violations are tallied but kept out of the rate.
    """
    if trials < 1000:
        raise ValueError(f"trials must be >= 1000, got {trials}")
    a_u, b_u = neighbor_degree_bounds(g, u)
    q = q_for(epsilon, delta)
    d_u = g.degree(u)
    radius = epsilon * (b_u - a_u) * d_u * lam
    truth = exact_dd(g, u, lam)
    edges = g.edges
    violations = 0
    worst = 0.0
    for i in range(trials):
        sk = AdjSketch(q, lam, derive_seed(base_seed, i))
        add = sk.add_edge
        for tail, head in edges:
            add(tail, head)
        err = abs(sk.query(u) - truth)
        worst = max(worst, err)
        if err > radius:
            violations += 1
    degenerate = a_u == b_u
    rate = 0.0 if degenerate else violations / trials
    return BoundCheckResult(
        node=u,
        q_used=q,
        epsilon=epsilon,
        delta=delta,
        trials=trials,
        violations=violations,
        empirical_rate=rate,
        bound_per_node={u: radius},
        degenerate=degenerate,
        max_abs_error=worst,
    )


@dataclass
class ErrorReport:
    per_node_abs_error: dict
    mean_error: Optional[float]

    @property
    def defined(self) -> bool:
        return self.mean_error is not None


def mean_error(g: StaticGraph, sketch: AdjSketch, nodes: Sequence[Hashable], lam: float) -> ErrorReport:
    """Absolute estimation error per listed node and its mean (None when empty)."""
    errs = {u: abs(sketch.query(u, lam) - exact_dd(g, u, lam)) for u in nodes}
    if not nodes:
        return ErrorReport({}, None)
    return ErrorReport(errs, sum(errs[u] for u in nodes) / len(nodes))


def space_advantage(n: int, m: int, q: int) -> bool:
    """Whether ``n + n (q + 1)`` sketch cells undercut ``n + m`` adjacency-list cells."""
    return n + n * (q + 1) < n + m


def space_report(sketch: AdjSketch, g: StaticGraph) -> dict:
    """Idealized and actual cell counts of the sketch against the full graph.

    ``advantage`` uses the idealized accounting over all ``n`` nodes; the
    ``allocated_*`` fields count what the sketch actually holds (rows exist
    only for nodes seen as a head).
    """
    n, m, q = g.n, g.m, sketch.q
    rows = len(sketch)
    return {
        "n": n,
        "m": m,
        "q": q,
        "d_in": m / n if n else 0.0,
        "sketch_cells": n + n * (q + 1),
        "full_graph_cells": n + m,
        "advantage": space_advantage(n, m, q),
        "allocated_rows": rows,
        "allocated_cells": rows * (q + 1),
        "allocated_slot_cells": sketch.allocated_slot_cells,
        "filled_slot_cells": sketch.filled_slot_cells,
    }


@dataclass
class PhaseTimer:
    """Wall-clock durations per named phase, in seconds, on a monotonic clock."""

    durations: dict = field(default_factory=dict)

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.durations[name] = self.durations.get(name, 0.0) + time.perf_counter() - start

    def report(self) -> dict:
        return dict(self.durations)
