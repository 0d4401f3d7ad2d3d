"""Synthetic world with planted verb-argument preferences.

Builds a small noun hierarchy (root -> two branches -> a few classes ->
kinds -> leaf words) plus a verb inventory where each verb licenses
exactly one (subject class, object class) pair.  Corpora sampled from the
world follow those affordances by construction, which makes the generator
its own ground-truth oracle: any event can be labeled plausible or
implausible exactly.

Used by the end-to-end tests and the demo scripts to check that a scorer
trained on sampled text recovers the planted preferences.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .abstraction import Event
from .corpus import TripleCorpus, sample_negative, PerturbationError
from .lexicon import Hierarchy, SenseMap, Synset, build_hierarchy
from .metrics import LabeledEvent

ROOT_ID = "entity.n.01"

# Depths in the generated hierarchy: root 1, branches 2, classes 3,
# kinds 4, leaves 5.  Class nodes are the most abstract level that should
# survive filtering, so pipelines over this world use min_depth=3.
MIN_USEFUL_DEPTH = 3


@dataclass(frozen=True)
class PlantedConfig:
    subject_classes: int = 3
    object_classes: int = 3
    kinds_per_class: int = 2
    leaves_per_class: int = 20
    class_word_prob: float = 0.15
    kind_word_prob: float = 0.10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.subject_classes < 1 or self.object_classes < 1:
            raise ValueError("need at least one class per side")
        if self.kinds_per_class < 1:
            raise ValueError("kinds_per_class must be >= 1")
        if self.leaves_per_class < self.kinds_per_class:
            raise ValueError("leaves_per_class must be >= kinds_per_class")
        if not 0.0 <= self.class_word_prob + self.kind_word_prob < 1.0:
            raise ValueError("class/kind word probabilities must leave room for leaves")


@dataclass(frozen=True)
class PlantedWorld:
    config: PlantedConfig
    hierarchy: Hierarchy
    sense_map: SenseMap
    allowed: dict[str, tuple[int, int]]  # verb word -> licensed class pair
    subject_class_of: dict[str, int]  # noun word -> class index, per side
    object_class_of: dict[str, int]

    def plausible(self, event: Event) -> bool:
        pair = self.allowed.get(event.verb)
        if pair is None:
            return False
        return (
            self.subject_class_of.get(event.subject) == pair[0]
            and self.object_class_of.get(event.object) == pair[1]
        )


def _side_records(side: str, n_classes: int, cfg: PlantedConfig, branch_id: str):
    """Hierarchy records and word->class map for one argument side."""
    records = []
    class_of: dict[str, int] = {}
    for c in range(n_classes):
        class_lemma = f"{side}class{c}"
        class_id = f"{class_lemma}.n.01"
        records.append((class_id, class_lemma, (branch_id,)))
        class_of[class_lemma] = c
        # leaves are dealt round-robin to the class's kinds
        for k in range(cfg.kinds_per_class):
            kind_lemma = f"{side}group{c}{chr(97 + k)}"
            records.append((f"{kind_lemma}.n.01", kind_lemma, (class_id,)))
            class_of[kind_lemma] = c
        for leaf in range(cfg.leaves_per_class):
            kind_lemma = f"{side}group{c}{chr(97 + leaf % cfg.kinds_per_class)}"
            leaf_lemma = f"{side}{c}{chr(97 + leaf % cfg.kinds_per_class)}{leaf:02d}"
            records.append((f"{leaf_lemma}.n.01", leaf_lemma, (f"{kind_lemma}.n.01",)))
            class_of[leaf_lemma] = c
    return records, class_of


def build_world(cfg: PlantedConfig) -> PlantedWorld:
    records = [
        (ROOT_ID, "entity", ()),
        ("actor.n.01", "actor", (ROOT_ID,)),
        ("item.n.01", "item", (ROOT_ID,)),
    ]
    subj_records, subject_class_of = _side_records(
        "s", cfg.subject_classes, cfg, "actor.n.01"
    )
    obj_records, object_class_of = _side_records(
        "o", cfg.object_classes, cfg, "item.n.01"
    )
    records += subj_records + obj_records
    allowed = {
        f"verb{i * cfg.object_classes + j}": (i, j)
        for i in range(cfg.subject_classes)
        for j in range(cfg.object_classes)
    }
    return PlantedWorld(
        config=cfg,
        hierarchy=build_hierarchy(records),
        sense_map=SenseMap(entries={}),  # unique lemmas; fallback resolution suffices
        allowed=allowed,
        subject_class_of=subject_class_of,
        object_class_of=object_class_of,
    )


def _argument_word(
    world: PlantedWorld, side: str, class_index: int, rng: np.random.Generator
) -> str:
    """Sample a word for one argument slot: leaf, kind, or the class itself."""
    cfg = world.config
    r = rng.random()
    if r < cfg.class_word_prob:
        return f"{side}class{class_index}"
    if r < cfg.class_word_prob + cfg.kind_word_prob:
        k = int(rng.integers(cfg.kinds_per_class))
        return f"{side}group{class_index}{chr(97 + k)}"
    leaf = int(rng.integers(cfg.leaves_per_class))
    return f"{side}{class_index}{chr(97 + leaf % cfg.kinds_per_class)}{leaf:02d}"


def sample_positive(world: PlantedWorld, rng: np.random.Generator) -> Event:
    verbs = sorted(world.allowed)
    verb = verbs[int(rng.integers(len(verbs)))]
    i, j = world.allowed[verb]
    return Event(
        subject=_argument_word(world, "s", i, rng),
        verb=verb,
        object=_argument_word(world, "o", j, rng),
    )


def sample_corpus(world: PlantedWorld, n_triples: int, rng: np.random.Generator) -> TripleCorpus:
    counts: Counter[Event] = Counter()
    for _ in range(n_triples):
        counts[sample_positive(world, rng)] += 1
    return TripleCorpus.from_counts(dict(counts))


def heldout_set(
    world: PlantedWorld,
    corpus: TripleCorpus,
    n_pairs: int,
    rng: np.random.Generator,
    max_tries: int = 100,
) -> list[LabeledEvent]:
    """Fresh positives paired with oracle-verified implausible perturbations.

    Negatives follow the usual perturbation protocol (corpus-frequency
    replacements), but any draw the world accidentally licenses is
    rejected and redrawn, so labels are exact.
    """
    labeled: list[LabeledEvent] = []
    for _ in range(n_pairs):
        positive = sample_positive(world, rng)
        negative: Optional[Event] = None
        for _ in range(max_tries):
            try:
                candidate = sample_negative(corpus, positive, rng).negative
            except PerturbationError:
                continue
            if not world.plausible(candidate):
                negative = candidate
                break
        if negative is None:
            raise RuntimeError(
                f"could not draw an implausible perturbation of {positive} "
                f"in {max_tries} tries"
            )
        labeled.append(LabeledEvent(event=positive, plausible=True))
        labeled.append(LabeledEvent(event=negative, plausible=False))
    return labeled
