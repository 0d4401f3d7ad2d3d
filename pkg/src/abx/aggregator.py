"""Max-over-abstractions wrapper around a base scorer.

At inference time the wrapped logit of an event is the hard maximum of the
base logits over every cell of the event's abstraction grid, i.e. the event
is judged as plausible as its most plausible reading at any level of the
noun hierarchy.  Because a rendered grid cell re-resolves to a prefix of
the same chains, wrapped grid scores are running maxima -- monotone along
both axes -- so the wrapped scorer has no strict local extrema by
construction.

At training time the hard max is replaced by a LogSumExp over the logits of
the original event plus a small sampled set of its abstractions (soft max,
so gradient reaches every sampled cell).  Sampling is deterministic per
(seed, event): an event keeps the same sampled abstractions for a whole
training run.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .abstraction import (
    AbstractionPlan,
    Event,
    abstraction_events,
    render_cell,
    score_grid,
)
from .lexicon import Hierarchy, SenseMap
from .mathutil import logsumexp
from .scorers.base import Scorer

Mode = Literal["inference", "train"]

DEFAULT_TRAIN_SAMPLE_COUNT = 3


def _event_rng(seed: int, event: Event) -> np.random.Generator:
    """Stable per-event generator (independent of Python hash randomization)."""
    digest = hashlib.sha256("\x1f".join(event.words()).encode("utf-8")).digest()
    return np.random.default_rng([seed, int.from_bytes(digest[:8], "little")])


@dataclass(frozen=True)
class AbstractionSampler:
    """Expands events into abstraction cells, with seeded training sampling.

    ``sample_count`` bounds how many abstractions join the original event
    in the training-time group (fewer when the grid is small).
    """

    hierarchy: Hierarchy
    sense_map: SenseMap
    sample_count: int = DEFAULT_TRAIN_SAMPLE_COUNT
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sample_count < 0:
            raise ValueError(f"sample_count must be >= 0, got {self.sample_count}")

    def plan(self, event: Event) -> AbstractionPlan:
        return abstraction_events(self.hierarchy, self.sense_map, event)

    def rendered_cells(self, event: Event) -> list[Event]:
        """All grid cells as surface events, row-major; last is the original."""
        plan = self.plan(event)
        return [render_cell(self.hierarchy, event, cell) for cell in plan.cells]

    def training_cells(self, event: Event) -> list[Event]:
        """Sampled abstractions plus the original event (original last)."""
        cells = self.rendered_cells(event)
        pool = len(cells) - 1  # every cell except the original
        k = min(self.sample_count, pool)
        if k == 0:
            return [cells[-1]]
        picked = _event_rng(self.seed, event).choice(pool, size=k, replace=False)
        return [cells[i] for i in sorted(picked)] + [cells[-1]]


@dataclass
class ConceptMaxScorer:
    """Scorer decorator; see module docstring."""

    base: Scorer
    sampler: AbstractionSampler
    mode: Mode = "inference"

    def __post_init__(self) -> None:
        if self.mode not in ("inference", "train"):
            raise ValueError(f"mode must be 'inference' or 'train', got {self.mode!r}")

    @classmethod
    def build(
        cls,
        base: Scorer,
        hierarchy: Hierarchy,
        sense_map: SenseMap,
        mode: Mode = "inference",
        sample_count: int = DEFAULT_TRAIN_SAMPLE_COUNT,
        seed: int = 0,
    ) -> "ConceptMaxScorer":
        sampler = AbstractionSampler(hierarchy, sense_map, sample_count, seed)
        return cls(base=base, sampler=sampler, mode=mode)

    @property
    def name(self) -> str:
        return f"conceptmax({self.base.name})"

    @property
    def deterministic(self) -> bool:
        # Train-mode sampling is keyed by (seed, event), so the wrapper is
        # exactly as repeatable as its base scorer.
        return self.base.deterministic

    @property
    def concurrent_safe(self) -> bool:
        return self.base.concurrent_safe

    def inference_logit(self, event: Event) -> float:
        grid = score_grid(self.base, self.sampler.hierarchy, self.sampler.plan(event))
        return float(grid.scores.max())

    def train_logit(self, event: Event) -> float:
        return logsumexp(
            [self.base.logit(c) for c in self.sampler.training_cells(event)]
        )

    def logit(self, event: Event) -> float:
        if self.mode == "inference":
            return self.inference_logit(event)
        return self.train_logit(event)
