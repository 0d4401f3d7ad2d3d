"""Shared fixtures: tiny hierarchies, corpora, and deterministic fake scorers."""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field

import numpy as np
import pytest

from abx.abstraction import Event
from abx.corpus import TripleCorpus
from abx.lexicon import Hierarchy, SenseMap, build_hierarchy

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def data_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)


# root -> (b, c) -> d: the smallest multi-parent hierarchy
DIAMOND_RECORDS = [
    ("a.n.01", "alpha", ()),
    ("b.n.01", "bravo", ("a.n.01",)),
    ("c.n.01", "charlie", ("a.n.01",)),
    ("d.n.01", "delta", ("b.n.01", "c.n.01")),
]

# linear chain with one synset per depth 1..6, lemmas c1..c6
CHAIN_RECORDS = [
    (f"c{i}.n.01", f"c{i}", () if i == 1 else (f"c{i - 1}.n.01",)) for i in range(1, 7)
]

# small two-branch taxonomy used by grid tests:
#   entity(1) > living(2) > animal(3) > {dog(4), cat(4)}
#   entity(1) > stuff(2)  > food(3)   > {apple(4), bread(4)}
TAXONOMY_RECORDS = [
    ("entity.n.01", "entity", ()),
    ("living.n.01", "living", ("entity.n.01",)),
    ("stuff.n.01", "stuff", ("entity.n.01",)),
    ("animal.n.01", "animal", ("living.n.01",)),
    ("food.n.01", "food", ("stuff.n.01",)),
    ("dog.n.01", "dog", ("animal.n.01",)),
    ("cat.n.01", "cat", ("animal.n.01",)),
    ("apple.n.01", "apple", ("food.n.01",)),
    ("bread.n.01", "bread", ("food.n.01",)),
]


@pytest.fixture
def diamond() -> Hierarchy:
    return build_hierarchy(DIAMOND_RECORDS)


@pytest.fixture
def chain6() -> Hierarchy:
    return build_hierarchy(CHAIN_RECORDS)


@pytest.fixture
def taxonomy() -> Hierarchy:
    return build_hierarchy(TAXONOMY_RECORDS)


@pytest.fixture
def empty_sense_map() -> SenseMap:
    return SenseMap()


@pytest.fixture
def toy_corpus() -> TripleCorpus:
    counts = {
        Event("dog", "eat", "apple"): 5,
        Event("dog", "eat", "bread"): 3,
        Event("cat", "eat", "apple"): 4,
        Event("cat", "chase", "dog"): 2,
    }
    return TripleCorpus.from_counts(counts)


@dataclass
class StableRandomScorer:
    """Deterministic pseudo-random logits keyed by the event's words.

    Same event, same logit -- forever -- without any lookup table, which
    makes it the right stand-in for an arbitrary but fixed base model.
    """

    seed: int = 0
    low: float = -5.0
    high: float = 5.0
    deterministic: bool = field(default=True, init=False)
    concurrent_safe: bool = field(default=True, init=False)

    @property
    def name(self) -> str:
        return f"stable-random({self.seed})"

    def logit(self, event: Event) -> float:
        key = "\x1f".join((str(self.seed),) + event.words()).encode("utf-8")
        digest = hashlib.sha256(key).digest()
        u = int.from_bytes(digest[:8], "little") / 2**64
        return self.low + (self.high - self.low) * u


@dataclass
class RecordingScorer:
    """Fixed logits from a table; raises KeyError for unknown events."""

    table: dict[tuple[str, str, str], float]
    calls: list[Event] = field(default_factory=list)
    name: str = "recording"
    deterministic = True
    concurrent_safe = False

    def logit(self, event: Event) -> float:
        self.calls.append(event)
        return self.table[event.words()]


@pytest.fixture
def stable_scorer() -> StableRandomScorer:
    return StableRandomScorer(seed=1234)
