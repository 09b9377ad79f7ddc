"""Bounded-memory diffusion-degree sketch.

Every node that has appeared as a head owns one row: an in-degree counter
followed by ``q`` sampled in-neighbor slots. A point query reads the row, the
slots, and the counters of the sampled neighbors, and scales the sampled
neighbor-degree sum back up to the full neighborhood.

Access contract: all calls to :meth:`AdjSketch.next` must be serialized by
the caller. Queries never mutate state and may run concurrently with each
other, but not with ``next``.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Optional

from .sampler import SlotArray, new_slots, observe
from .stream import EdgeEvent

SNAPSHOT_FORMAT = "ddstream-sketch"
SNAPSHOT_VERSION = 1


@dataclass
class SketchRow:
    degree: int
    slots: SlotArray = field(default_factory=list)
    weight_sum: float = 0.0


class AdjSketch:
    """In-degree counters plus ``q`` with-replacement neighbor samples per node.

    Args:
        q: slots per node.
        lam: common diffusion probability used by :meth:`query`.
        seed: seed of the single generator driving all slot replacements.
        weighted: also accumulate per-node sums of edge weights, enabling
            :meth:`query_weighted`; every event must then carry a weight.
    """

    def __init__(self, q: int, lam: float = 0.1, seed: int = 0, weighted: bool = False):
        if int(q) != q or q < 1:
            raise ValueError(f"q must be a positive integer, got {q!r}")
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"lam must lie in [0, 1], got {lam!r}")
        self.q = int(q)
        self.lam = float(lam)
        self.seed = int(seed)
        self.weighted = bool(weighted)
        self._rng = random.Random(self.seed)
        self._degree: dict = {}
        self._slots: dict = {}
        self._weight: dict = {}

    @property
    def mode(self) -> str:
        return "weighted" if self.weighted else "uniform"

    def next(self, event: EdgeEvent) -> None:
        self.add_edge(event.tail, event.head, event.weight)

    def add_edge(self, tail: Hashable, head: Hashable, weight: Optional[float] = None) -> None:
        """Count the edge at ``head``, then resample the head's slots.

        Only the head's row changes.
        """
        if self.weighted and weight is None:
            raise ValueError(f"weighted sketch received edge ({tail!r}, {head!r}) without a weight")
        d = self._degree.get(head, 0) + 1
        self._degree[head] = d
        slots = self._slots.get(head)
        if slots is None:
            slots = self._slots[head] = new_slots(self.q)
        observe(slots, tail, d, self._rng)
        if self.weighted:
            self._weight[head] = self._weight.get(head, 0.0) + weight

    def extend(self, events: Iterable[EdgeEvent]) -> "AdjSketch":
        for ev in events:
            self.add_edge(ev.tail, ev.head, ev.weight)
        return self

    def _scan(self, u, counters: dict):
        """Walk u's row; returns (d_u, nCount, neighbor sum, cell accesses)."""
        accesses = 1
        d = self._degree.get(u, 0)
        slots = self._slots.get(u)
        if slots is None:
            return d, 0, 0, accesses
        n = 0
        total = 0
        for s in slots:
            accesses += 1
            if s is not None:
                n += 1
                total += counters.get(s, 0)
                accesses += 1
        return d, n, total, accesses

    def query(self, u: Hashable, lam: Optional[float] = None) -> float:
        """Diffusion-degree estimate of ``u``; 0 for a node never seen as head.

        ``lam`` rescales the answer without rebuilding (the state is
        lambda-free and the estimate is linear in lambda).
        """
        d, n, total, _ = self._scan(u, self._degree)
        if n == 0:
            return 0.0
        lam = self.lam if lam is None else lam
        # d * total / n rather than (d / n) * total: exact when every slot holds the same node
        return lam * (d * total / n + d)

    def query_weighted(self, u: Hashable) -> float:
        """Estimate under per-edge propagation probabilities.

        Uses the node's in-weight sum ``W`` in place of ``lam * d_u`` and the
        sampled neighbors' in-weight sums in place of their degrees:
        ``W + (W / nCount) * sum``.
        """
        if not self.weighted:
            raise ValueError("query_weighted requires a sketch built with weighted=True")
        _, n, total, _ = self._scan(u, self._weight)
        if n == 0:
            return 0.0
        w = self._weight.get(u, 0.0)
        return w + w * total / n

    def access_count(self, u: Hashable) -> int:
        """Number of row cells a query of ``u`` touches (at most 2q + 1)."""
        return self._scan(u, self._degree)[3]

    def degree(self, u: Hashable) -> int:
        return self._degree.get(u, 0)

    def row(self, u: Hashable) -> Optional[SketchRow]:
        if u not in self._degree:
            return None
        return SketchRow(self._degree[u], list(self._slots[u]), self._weight.get(u, 0.0))

    def nodes(self) -> Iterator:
        return iter(self._degree)

    def __len__(self):
        return len(self._degree)

    def __contains__(self, u):
        return u in self._degree

    @property
    def allocated_slot_cells(self) -> int:
        return sum(len(s) for s in self._slots.values())

    @property
    def filled_slot_cells(self) -> int:
        return sum(1 for s in self._slots.values() for x in s if x is not None)

    # -- snapshots ---------------------------------------------------------

    def to_dict(self) -> dict:
        version, internal, gauss = self._rng.getstate()
        return {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "q": self.q,
            "lambda": self.lam,
            "seed": self.seed,
            "mode": self.mode,
            "rng_state": [version, list(internal), gauss],
            "rows": [
                [u, d, self._weight.get(u, 0.0), list(self._slots[u])]
                for u, d in self._degree.items()
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AdjSketch":
        if data.get("format") != SNAPSHOT_FORMAT:
            raise ValueError(f"not a sketch snapshot (format={data.get('format')!r})")
        if data.get("version") != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {data.get('version')!r}")
        sk = cls(data["q"], data["lambda"], data["seed"], weighted=data["mode"] == "weighted")
        version, internal, gauss = data["rng_state"]
        sk._rng.setstate((version, tuple(internal), gauss))
        for u, d, w, slots in data["rows"]:
            if len(slots) != sk.q:
                raise ValueError(f"row {u!r} has {len(slots)} slots, expected {sk.q}")
            sk._degree[u] = d
            sk._slots[u] = list(slots)
            if sk.weighted:
                sk._weight[u] = w
        return sk

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def load(cls, path: str | os.PathLike) -> "AdjSketch":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def __repr__(self):
        return f"AdjSketch(q={self.q}, lam={self.lam}, seed={self.seed}, mode={self.mode!r}, rows={len(self)})"
