"""Count-based plausibility scorer.

Treats the two argument slots as conditionally independent given the verb:

    p(s, v, o) = (count(s, v) * count(v, o)) / count(v)^2

which is p(s | v) * p(o | v) estimated from corpus counts.  The probability
is clamped away from {0, 1} before the logit transform so unseen events get
a large negative logit instead of -inf.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..abstraction import Event
from ..corpus import TripleCorpus
from ..mathutil import logit as logit_of_probability

DEFAULT_EPSILON = 1e-9


@dataclass(frozen=True)
class NGramScorer:
    sv_counts: dict[tuple[str, str], int]
    vo_counts: dict[tuple[str, str], int]
    verb_counts: dict[str, int]
    epsilon: float = DEFAULT_EPSILON
    name: str = field(default="ngram", init=False)

    deterministic = True
    concurrent_safe = True

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must be in (0, 0.5), got {self.epsilon}")

    @classmethod
    def from_corpus(cls, corpus: TripleCorpus, epsilon: float = DEFAULT_EPSILON) -> "NGramScorer":
        return cls(
            sv_counts=dict(corpus.sv_counts),
            vo_counts=dict(corpus.vo_counts),
            verb_counts=dict(corpus.positional_counts["verb"]),
            epsilon=epsilon,
        )

    def probability(self, event: Event) -> float:
        """Unclamped conditional-independence estimate; 0 for unseen verbs."""
        v = self.verb_counts.get(event.verb, 0)
        if v == 0:
            return 0.0
        sv = self.sv_counts.get((event.subject, event.verb), 0)
        vo = self.vo_counts.get((event.verb, event.object), 0)
        return (sv * vo) / (v * v)

    def logit(self, event: Event) -> float:
        p = self.probability(event)
        p = min(max(p, self.epsilon), 1.0 - self.epsilon)
        return float(logit_of_probability(p))
