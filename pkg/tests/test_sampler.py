import random
from collections import Counter

import pytest
from scipy import stats

from ddstream.sampler import new_slots, observe


def test_first_edge_fills_every_slot():
    slots = observe(new_slots(5), "a", 1, random.Random(0))
    assert slots == ["a"] * 5


def test_zero_degree_rejected():
    with pytest.raises(ValueError):
        observe(new_slots(2), "a", 0, random.Random(0))
    with pytest.raises(ValueError):
        new_slots(0)


class CountingRandom(random.Random):
    calls = 0

    def random(self):
        self.calls += 1
        return super().random()


def test_consumes_exactly_q_draws():
    rng = CountingRandom(3)
    observe(new_slots(7), "a", 4, rng)
    assert rng.calls == 7


def test_per_slot_replacement_frequency_quarter():
    # q=3, degree 4: every slot flips independently with p = 1/4
    rng = random.Random(11)
    trials = 100_000
    hits = [0, 0, 0]
    for _ in range(trials):
        slots = observe(["old"] * 3, "new", 4, rng)
        for i, s in enumerate(slots):
            hits[i] += s == "new"
    for h in hits:
        assert abs(h / trials - 0.25) <= 0.01


def test_second_edge_frequency_half_over_seeds():
    trials = 20_000
    wins = 0
    for seed in range(trials):
        rng = random.Random(seed)
        slots = new_slots(1)
        observe(slots, "t1", 1, rng)
        observe(slots, "t2", 2, rng)
        wins += slots[0] == "t2"
    assert abs(wins / trials - 0.5) <= 0.01


@pytest.mark.parametrize("d", [2, 3, 5])
def test_marginal_uniformity(d):
    tails = [f"t{i}" for i in range(d)]
    counts = Counter()
    replays = 12_000
    for seed in range(replays):
        rng = random.Random(seed)
        slots = new_slots(1)
        for k, t in enumerate(tails, start=1):
            observe(slots, t, k, rng)
        counts[slots[0]] += 1
    observed = [counts[t] for t in tails]
    assert stats.chisquare(observed).pvalue > 1e-3


def test_slot_independence_q2():
    tails = ["a", "b", "c"]
    table = [[0] * 3 for _ in range(3)]
    for seed in range(15_000):
        rng = random.Random(seed)
        slots = new_slots(2)
        for k, t in enumerate(tails, start=1):
            observe(slots, t, k, rng)
        table[tails.index(slots[0])][tails.index(slots[1])] += 1
    chi2, p, dof, _ = stats.chi2_contingency(table)
    assert p > 1e-3


def test_no_null_after_first_edge():
    rng = random.Random(5)
    slots = new_slots(4)
    for k in range(1, 50):
        observe(slots, k, k, rng)
        assert None not in slots
