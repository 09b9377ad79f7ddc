"""Online top-k seed selection from streaming diffusion-degree estimates.

After each edge the head's fresh estimate is offered to a size-k min-heap.
Members are refreshed only when they reappear as a head, so stored estimates
of other members may be stale; that is the intended behavior.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Optional

from .oracle import _tie_key
from .sketch import AdjSketch
from .stream import EdgeEvent


def _below(a, b) -> bool:
    """Heap order: smaller estimate first; among equals the larger id sits nearer the root."""
    if a[0] != b[0]:
        return a[0] < b[0]
    return _tie_key(a[1]) > _tie_key(b[1])


class TopKTracker:
    """Size-``k`` min-heap of ``(estimate, node)`` entries with O(1) membership.

    ``linear_scan=True`` finds members by scanning the heap array (O(k) per
    edge, as in the reference procedure) instead of the position index; both
    paths produce identical states.
    """

    def __init__(self, k: int, sketch: Optional[AdjSketch] = None, *, linear_scan: bool = False):
        if k < 1:
            raise ValueError(f"k must be positive, got {k}")
        self.k = k
        self.sketch = sketch
        self.linear_scan = linear_scan
        self._heap: list[list] = []
        self._pos: dict = {}

    def next(self, event: EdgeEvent) -> float:
        """Feed one edge to the sketch and offer the head's new estimate."""
        if self.sketch is None:
            raise RuntimeError("tracker has no sketch; use offer() with external estimates")
        self.sketch.add_edge(event.tail, event.head, event.weight)
        estimate = self.sketch.query(event.head)
        self.offer(event.head, estimate)
        return estimate

    def extend(self, events: Iterable[EdgeEvent]) -> "TopKTracker":
        for ev in events:
            self.next(ev)
        return self

    def _find(self, node) -> Optional[int]:
        if not self.linear_scan:
            return self._pos.get(node)
        for i, entry in enumerate(self._heap):
            if entry[1] == node:
                return i
        return None

    def offer(self, node: Hashable, estimate: float) -> None:
        heap = self._heap
        i = self._find(node)
        if i is not None:
            old = heap[i][0]
            heap[i][0] = estimate
            if estimate < old:
                self._sift_up(i)
            else:
                self._sift_down(i)
            return
        if len(heap) < self.k:
            heap.append([estimate, node])
            self._pos[node] = len(heap) - 1
            self._sift_up(len(heap) - 1)
            return
        if estimate > heap[0][0]:
            del self._pos[heap[0][1]]
            heap[0] = [estimate, node]
            self._pos[node] = 0
            self._sift_down(0)

    def peek(self) -> Optional[tuple[float, Hashable]]:
        return tuple(self._heap[0]) if self._heap else None

    def query(self) -> list[tuple[Hashable, float]]:
        """Members as ``(node, stored estimate)``, best first, ties to the lower id."""
        out = [(node, est) for est, node in self._heap]
        out.sort(key=lambda t: (-t[1], _tie_key(t[0])))
        return out

    def seeds(self) -> list:
        return [node for node, _ in self.query()]

    def __len__(self):
        return len(self._heap)

    def __contains__(self, node):
        return node in self._pos

    @property
    def members(self) -> set:
        return set(self._pos)

    def _swap(self, i, j):
        heap = self._heap
        heap[i], heap[j] = heap[j], heap[i]
        self._pos[heap[i][1]] = i
        self._pos[heap[j][1]] = j

    def _sift_up(self, i):
        heap = self._heap
        while i > 0:
            parent = (i - 1) >> 1
            if not _below(heap[i], heap[parent]):
                break
            self._swap(i, parent)
            i = parent

    def _sift_down(self, i):
        heap = self._heap
        size = len(heap)
        while True:
            smallest = i
            for child in (2 * i + 1, 2 * i + 2):
                if child < size and _below(heap[child], heap[smallest]):
                    smallest = child
            if smallest == i:
                return
            self._swap(i, smallest)
            i = smallest
