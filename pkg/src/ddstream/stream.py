"""Edge-list ingestion.

The text format is one edge per line, ``tail head [weight] [ignored...]``.
For an edge ``e(v, u)`` the tail ``v`` comes first and the head ``u`` (the
node whose sketch row is updated) second. Fields are separated by a run of
whitespace or by a single comma. Blank lines and lines starting with ``#`` or
``%`` are skipped. File order defines the sequence number of each event.
"""

from __future__ import annotations

import io
import os
import re
from typing import Hashable, Iterable, Iterator, NamedTuple, Optional, Union

__all__ = [
    "EdgeEvent",
    "EdgeParseError",
    "NodeInterner",
    "open_edge_stream",
    "count_stream",
    "write_edge_list",
]

_COMMA = re.compile(r"\s*,\s*")
_DELIMITERS = ("auto", "whitespace", "comma")


class EdgeParseError(ValueError):
    """A malformed line in an edge-list source."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class EdgeEvent(NamedTuple):
    tail: Hashable
    head: Hashable
    seq: int
    weight: Optional[float] = None


class NodeInterner:
    """Maps external node labels to dense integer ids in first-seen order."""

    def __init__(self):
        self._ids: dict = {}
        self._labels: list = []

    def intern(self, label) -> int:
        node = self._ids.get(label)
        if node is None:
            node = len(self._labels)
            self._ids[label] = node
            self._labels.append(label)
        return node

    def resolve(self, node: int):
        return self._labels[node]

    def lookup(self, label) -> Optional[int]:
        """Id of ``label`` if it was interned, else None (never assigns)."""
        return self._ids.get(label)

    def __len__(self):
        return len(self._labels)

    def __contains__(self, label):
        return label in self._ids

    @property
    def labels(self) -> list:
        return list(self._labels)


def _split(line: str, delimiter: str) -> list[str]:
    if delimiter == "whitespace":
        return line.split()
    if delimiter == "comma":
        return [f.strip() for f in line.split(",")]
    if "," in line:
        return _COMMA.split(line.strip())
    return line.split()


def _lines(source) -> Iterator[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from fh
        return
    if isinstance(source, io.TextIOBase):
        yield from source
        return
    for raw in source:
        yield raw.decode("utf-8") if isinstance(raw, bytes) else raw


def open_edge_stream(
    source: Union[str, os.PathLike, io.IOBase, Iterable],
    *,
    delimiter: str = "auto",
    directed: bool = True,
    weighted: bool = False,
    interner: Optional[NodeInterner] = None,
) -> Iterator[EdgeEvent]:
    """Yield the edge events of ``source`` in file order.

    ``source`` is a path, a binary or text stream, or any iterable of lines.
    With an ``interner`` the yielded endpoints are dense integer ids,
    otherwise they are the raw string labels. An undirected line ``v u``
    yields ``(v, u)`` and then ``(u, v)`` with consecutive sequence numbers.

    Raises EdgeParseError naming the 1-based physical line on a line with too
    few fields, an unparseable weight, or a weight outside [0, 1].
    """
    if delimiter not in _DELIMITERS:
        raise ValueError(f"delimiter must be one of {_DELIMITERS}, got {delimiter!r}")
    need = 3 if weighted else 2
    seq = 0
    for lineno, line in enumerate(_lines(source), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in "#%":
            continue
        fields = _split(stripped, delimiter)
        if len(fields) < need or not all(fields[:need]):
            raise EdgeParseError(lineno, f"expected at least {need} fields, got {stripped!r}")
        tail, head = fields[0], fields[1]
        weight = None
        if weighted:
            try:
                weight = float(fields[2])
            except ValueError:
                raise EdgeParseError(lineno, f"unparseable weight {fields[2]!r}") from None
            if not 0.0 <= weight <= 1.0:
                raise EdgeParseError(lineno, f"weight {weight} outside [0, 1]")
        if interner is not None:
            tail, head = interner.intern(tail), interner.intern(head)
        yield EdgeEvent(tail, head, seq, weight)
        seq += 1
        if not directed:
            yield EdgeEvent(head, tail, seq, weight)
            seq += 1


def count_stream(events: Iterable[EdgeEvent]) -> tuple[int, int]:
    """Return ``(n, m)``: distinct endpoints and number of events."""
    nodes = set()
    m = 0
    for ev in events:
        nodes.add(ev.tail)
        nodes.add(ev.head)
        m += 1
    return len(nodes), m


def write_edge_list(events: Iterable[EdgeEvent], dest, *, weighted: bool = False) -> None:
    """Write events in the text format read by :func:`open_edge_stream`."""

    def _emit(fh):
        for ev in events:
            if weighted:
                fh.write(f"{ev.tail} {ev.head} {ev.weight!r}\n")
            else:
                fh.write(f"{ev.tail} {ev.head}\n")

    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            _emit(fh)
    else:
        _emit(dest)
