import random

import pytest

from ddstream.stream import EdgeEvent


def events_from_pairs(pairs):
    return [EdgeEvent(t, h, i) for i, (t, h) in enumerate(pairs)]


def random_stream(rng: random.Random, n_nodes: int, n_edges: int):
    """Small random multigraph stream; self-loops and parallel edges allowed."""
    return events_from_pairs((rng.randrange(n_nodes), rng.randrange(n_nodes)) for _ in range(n_edges))


@pytest.fixture
def tmp_edges(tmp_path):
    def _write(text, name="edges.txt"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write


ACCEPTANCE_LINES = []


def record_criterion(number: int, name: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {name}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
