"""Scorer contract shared by every plausibility model in this package.

A scorer maps an (subject, verb, object) event to a real-valued logit;
plausibility is the logistic of that logit.  Everything downstream --
abstraction grids, consistency metrics, evaluation -- talks to scorers
through this one interface, so wrappers (e.g. the max-over-abstractions
aggregator) compose freely with base models.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from ..abstraction import Event
from ..mathutil import sigmoid


@runtime_checkable
class Scorer(Protocol):
    """Anything that can assign a plausibility logit to an event.

    Attributes
    ----------
    name:
        Short human-readable identifier, used in reports.
    deterministic:
        True if repeated calls with the same event return the same logit.
    concurrent_safe:
        True if ``logit`` may be called from multiple threads at once.
    """

    name: str
    deterministic: bool
    concurrent_safe: bool

    def logit(self, event: Event) -> float:
        """Return the raw (pre-sigmoid) plausibility score for ``event``."""
        ...


def plausibility(scorer: Scorer, event: Event) -> float:
    """Probability-scale score: logistic of the scorer's logit."""
    return float(sigmoid(scorer.logit(event)))


@dataclass(frozen=True)
class ConstantScorer:
    """Scores every event with the same fixed logit.

    Degenerate but useful: under a constant scorer every abstraction grid
    is flat, so both consistency metrics are exactly zero and AUC is 1/2.
    """

    value: float = 0.0

    @property
    def name(self) -> str:
        return f"constant({self.value:g})"

    deterministic = True
    concurrent_safe = True

    def logit(self, event: Event) -> float:
        return float(self.value)
