"""End-to-end runs over an edge-list file: sketch, exact, top-k, experiment.

CSV conventions shared by every writer here: a fixed header row, ``\\n``
line endings, node columns hold the original labels from the input file,
and floats are written with ``repr`` (shortest string that round-trips to
the same double, e.g. ``0.2`` or ``1e-05``).
"""

from __future__ import annotations

import csv
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from ._rng import derive_seed
from .analysis import PhaseTimer, mean_error, q_for
from .cascade import Cascade, CascadeConfig
from .oracle import StaticGraph, build, exact_dd, exact_topk
from .sketch import AdjSketch
from .stream import EdgeEvent, NodeInterner, count_stream, open_edge_stream
from .topk import TopKTracker

log = logging.getLogger(__name__)

_SYMBOLIC_Q = re.compile(r"^\s*d_in\s*-\s*(\d+)\s*$")

# stream keys for derive_seed, so sketch rounds and cascades never share randomness
SKETCH_STREAM = 1
CASCADE_STREAM = 2


@dataclass
class Dataset:
    events: list
    interner: NodeInterner
    path: str
    directed: bool

    def label(self, node) -> str:
        return self.interner.resolve(node)


def load(path, *, directed: bool = True, delimiter: str = "auto", weighted: bool = False) -> Dataset:
    interner = NodeInterner()
    events = list(
        open_edge_stream(path, delimiter=delimiter, directed=directed, weighted=weighted, interner=interner)
    )
    return Dataset(events, interner, str(path), directed)


def resolve_q(
    q: Optional[str | int] = None,
    epsilon: Optional[float] = None,
    delta: Optional[float] = None,
    *,
    n: Optional[int] = None,
    m: Optional[int] = None,
) -> int:
    """Turn exactly one of ``q`` or ``(epsilon, delta)`` into a slot count.

    ``q`` may be an integer or the symbolic ``"d_in-c"``, resolved from the
    average in-degree ``m / n`` as ``floor(d_in - c)``, floored at 1.
    """
    have_q = q is not None
    have_ed = epsilon is not None or delta is not None
    if have_q == have_ed:
        raise ValueError("give exactly one of q or the (epsilon, delta) pair")
    if have_ed:
        if epsilon is None or delta is None:
            raise ValueError("epsilon and delta must be given together")
        return q_for(epsilon, delta)
    sym = _SYMBOLIC_Q.match(str(q))
    if sym:
        if not n:
            raise ValueError("symbolic q needs a non-empty graph to measure d_in")
        d_in = m / n
        resolved = math.floor(d_in - int(sym.group(1)))
        if resolved < 1:
            log.warning("q = %s resolves to %s for d_in = %.4f; using q = 1", q, resolved, d_in)
            resolved = 1
        return resolved
    try:
        value = int(str(q))
    except ValueError:
        raise ValueError(f"q must be a positive integer or 'd_in-c', got {q!r}") from None
    if value < 1:
        raise ValueError(f"q must be >= 1, got {value}")
    return value


def resolve_q_for_file(path, q=None, epsilon=None, delta=None, *, directed=True, delimiter="auto", weighted=False):
    """Like :func:`resolve_q`, doing a counting pre-pass over the file only when needed."""
    n = m = None
    if q is not None and _SYMBOLIC_Q.match(str(q)):
        n, m = count_stream(open_edge_stream(path, delimiter=delimiter, directed=directed, weighted=weighted))
    return resolve_q(q, epsilon, delta, n=n, m=m)


def dds_topk(
    events: Sequence[EdgeEvent], ks: Sequence[int], q: int, lam: float, seed: int
) -> tuple[AdjSketch, dict[int, TopKTracker]]:
    """One streaming pass feeding a single sketch and one tracker per ``k``.

    Each tracker ends in the same state as a standalone tracker of its own
    ``k`` run over the same sketch seed: the sketch does not depend on k.
    """
    sketch = AdjSketch(q, lam, seed)
    trackers = {k: TopKTracker(k) for k in ks}
    add, query = sketch.add_edge, sketch.query
    offers = [t.offer for t in trackers.values()]
    for ev in events:
        add(ev.tail, ev.head, ev.weight)
        est = query(ev.head)
        for offer in offers:
            offer(ev.head, est)
    return sketch, trackers


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


class OutputSet:
    """Tracks files written under a directory so a failed run can remove them."""

    def __init__(self, out_dir):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def csv(self, name: str, header: Sequence[str], rows) -> Path:
        path = self.dir / name
        self.written.append(path)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(x) for x in row])
        return path

    def json(self, name: str, obj) -> Path:
        path = self.dir / name
        self.written.append(path)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path

    def track(self, name: str) -> Path:
        path = self.dir / name
        self.written.append(path)
        return path

    def discard(self) -> None:
        for path in self.written:
            try:
                path.unlink()
            except FileNotFoundError:
                pass


@dataclass
class ExperimentSpec:
    input: str
    k_list: list
    lam: float = 0.1
    q: Optional[str] = None
    epsilon: Optional[float] = None
    delta: Optional[float] = None
    directed: bool = True
    delimiter: str = "auto"
    icm_runs: int = 1000
    rounds: int = 5
    out_dir: str = "out"
    seed: int = 0
    orientation: str = "head-to-tail"

    def __post_init__(self):
        if (self.q is not None) == (self.epsilon is not None or self.delta is not None):
            raise ValueError("give exactly one of q or the (epsilon, delta) pair")
        ks = list(self.k_list)
        if not ks:
            raise ValueError("k_list must be non-empty")
        if any(k < 1 for k in ks):
            raise ValueError("every k must be >= 1")
        if ks != sorted(ks):
            raise ValueError("k_list must be ascending")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")


@dataclass
class ExperimentResult:
    q: int
    spread: list = field(default_factory=list)  # (k, method, mean, std)
    errors: list = field(default_factory=list)  # (k, mean_error)
    seeds: list = field(default_factory=list)  # (k, method, round, rank, label, score)
    timings: dict = field(default_factory=dict)
    n: int = 0
    m: int = 0


def run_experiment(spec: ExperimentSpec, graph: Optional[tuple[Dataset, StaticGraph]] = None) -> ExperimentResult:
    """Compare exact-DD seeds against streamed top-k seeds for every k.

    DD seeds come from the exact ranking; DDS seeds from ``spec.rounds``
    independently seeded streaming passes. Every seed set is evaluated on the
    same cascade randomness, so differences between methods are not Monte
    Carlo noise. The DDS row of the spread table pools all runs of all rounds.
    """
    timer = PhaseTimer()
    if graph is None:
        with timer.phase("ingest"):
            ds = load(spec.input, directed=spec.directed, delimiter=spec.delimiter)
        with timer.phase("exact_build"):
            g = build(ds.events)
    else:
        ds, g = graph
    q = resolve_q(spec.q, spec.epsilon, spec.delta, n=g.n, m=g.m)
    ks = list(spec.k_list)
    lam = spec.lam

    with timer.phase("sketch_build"):
        rounds = [dds_topk(ds.events, ks, q, lam, derive_seed(spec.seed, SKETCH_STREAM, r)) for r in range(spec.rounds)]
    with timer.phase("topk"):
        dd_top = {k: exact_topk(g, k, lam) if g.n else [] for k in ks}

    res = ExperimentResult(q=q, n=g.n, m=g.m)
    cascade = Cascade(g, spec.orientation)
    cfg = CascadeConfig(lam, spec.icm_runs, derive_seed(spec.seed, CASCADE_STREAM))
    with timer.phase("simulation"):
        for k in ks:
            dd_seeds = [u for u, _ in dd_top[k]]
            rep = cascade.simulate(dd_seeds, cfg)
            res.spread.append((k, "DD", rep.mean_spread, rep.std_spread))
            for rank, (u, score) in enumerate(dd_top[k], start=1):
                res.seeds.append((k, "DD", 0, rank, ds.label(u), score))

            pooled, errs = [], []
            for r, (sketch, trackers) in enumerate(rounds):
                top = trackers[k].query()
                seeds = [u for u, _ in top]
                pooled.extend(cascade.simulate(seeds, cfg).per_run)
                err = mean_error(g, sketch, seeds, lam)
                if err.defined:
                    errs.append(err.mean_error)
                for rank, (u, score) in enumerate(top, start=1):
                    res.seeds.append((k, "DDS", r, rank, ds.label(u), score))
            mean = sum(pooled) / len(pooled)
            std = math.sqrt(sum((x - mean) ** 2 for x in pooled) / len(pooled))
            res.spread.append((k, "DDS", mean, std))
            res.errors.append((k, sum(errs) / len(errs) if errs else float("nan")))
    res.timings = timer.report()
    return res


def write_experiment(res: ExperimentResult, out: OutputSet, spec: ExperimentSpec) -> None:
    out.csv("spread.csv", ["k", "method", "mean_spread", "std_spread"], res.spread)
    out.csv("mean_error.csv", ["k", "mean_error"], res.errors)
    out.csv("seeds.csv", ["k", "method", "round", "rank", "node", "score"], res.seeds)
    out.json(
        "timings.json",
        {
            "seconds": res.timings,
            "q": res.q,
            "n": res.n,
            "m": res.m,
            "rounds": spec.rounds,
            "icm_runs": spec.icm_runs,
        },
    )


def exact_rows(ds: Dataset, g: StaticGraph, lam: float):
    for node in range(len(ds.interner)):
        yield ds.label(node), g.degree(node), exact_dd(g, node, lam)


def sketch_rows(ds: Dataset, sketch: AdjSketch):
    for node in range(len(ds.interner)):
        yield ds.label(node), sketch.degree(node), sketch.query(node)

