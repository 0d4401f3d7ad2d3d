"""Triple corpus: CoNLL-U ingestion, frequency filters, and training-pair sampling.

A corpus is a bag of attested subject-verb-object events with occurrence
counts. Training pairs contrast an attested event with a random perturbation
whose replacement words are drawn from the positional unigram distributions.
"""

from __future__ import annotations

import bisect
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Literal, Optional

import numpy as np

from .abstraction import Event

Position = Literal["subject", "verb", "object"]
PerturbationForm = Literal["S", "O", "SO"]

NEGATIVE_RETRY_BOUND = 100


class MalformedConlluError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class PerturbationError(RuntimeError):
    """No distinct replacement word could be drawn within the retry bound."""


@dataclass
class ExtractionStats:
    sentences: int = 0
    extracted: int = 0
    malformed: int = 0
    no_triple: int = 0


@dataclass
class PairStats:
    pairs: int = 0
    unable_to_perturb: int = 0


@dataclass(frozen=True)
class TrainingPair:
    positive: Event
    negative: Event
    perturbation_form: PerturbationForm


@dataclass(frozen=True)
class _Token:
    idx: int
    lemma: str
    upos: str
    head: int
    deprel: str


def _parse_sentence(token_lines: list[tuple[int, str]]) -> list[_Token]:
    tokens = []
    for lineno, line in token_lines:
        parts = line.split("\t")
        if len(parts) != 10:
            raise MalformedConlluError(lineno, f"expected 10 fields, got {len(parts)}")
        tid, _form, lemma, upos, _xpos, _feats, head, deprel, _deps, _misc = parts
        # Multiword-token ranges (1-2) and empty nodes (1.1) are legal CoNLL-U
        # but carry no dependency of their own.
        if "-" in tid or "." in tid:
            continue
        try:
            idx = int(tid)
        except ValueError:
            raise MalformedConlluError(lineno, f"bad token id {tid!r}") from None
        try:
            head_idx = int(head)
        except ValueError:
            raise MalformedConlluError(lineno, f"bad head {head!r}") from None
        tokens.append(_Token(idx=idx, lemma=lemma, upos=upos, head=head_idx, deprel=deprel))
    return tokens


def _sentence_event(tokens: list[_Token]) -> Optional[Event]:
    """One event per qualifying transitive sentence, else None.

    Qualifying: a verbal root with exactly the relations nsubj and obj attached
    to it, no iobj anywhere, and both arguments common nouns.
    """
    if any(t.deprel == "iobj" for t in tokens):
        return None
    root = next((t for t in tokens if t.head == 0 and t.deprel == "root"), None)
    if root is None or root.upos != "VERB":
        return None
    subjects = [t for t in tokens if t.head == root.idx and t.deprel == "nsubj"]
    objects = [t for t in tokens if t.head == root.idx and t.deprel == "obj"]
    if not subjects or not objects:
        return None
    subj, obj = subjects[0], objects[0]
    if subj.upos != "NOUN" or obj.upos != "NOUN":
        return None
    for t in (subj, root, obj):
        if not t.lemma or t.lemma == "_":
            return None
    return Event.normalized(subj.lemma, root.lemma, obj.lemma)


def extract_triples(
    lines: Iterable[str],
    stats: Optional[ExtractionStats] = None,
    on_malformed: Literal["skip", "raise"] = "skip",
) -> Iterator[Event]:
    """Stream events from CoNLL-U input, one per qualifying sentence.

    Malformed records skip (and tally) the whole containing sentence by
    default; `on_malformed="raise"` surfaces them with their line number.
    """
    stats = stats if stats is not None else ExtractionStats()
    pending: list[tuple[int, str]] = []

    def flush() -> Optional[Event]:
        if not pending:
            return None
        stats.sentences += 1
        try:
            tokens = _parse_sentence(pending)
        except MalformedConlluError:
            if on_malformed == "raise":
                raise
            stats.malformed += 1
            return None
        finally:
            pending.clear()
        event = _sentence_event(tokens)
        if event is None:
            stats.no_triple += 1
            return None
        stats.extracted += 1
        return event

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            event = flush()
            if event is not None:
                yield event
            continue
        if line.startswith("#"):
            continue
        pending.append((lineno, line))
    event = flush()
    if event is not None:
        yield event


@dataclass(frozen=True)
class TripleCorpus:
    """Immutable event bag plus the derived positional and pair counts."""

    counts: dict[Event, int]

    @staticmethod
    def from_counts(counts: dict[Event, int]) -> "TripleCorpus":
        return TripleCorpus(counts=dict(counts))

    @cached_property
    def positional_counts(self) -> dict[Position, dict[str, int]]:
        subject: Counter = Counter()
        verb: Counter = Counter()
        object_: Counter = Counter()
        for event, count in self.counts.items():
            subject[event.subject] += count
            verb[event.verb] += count
            object_[event.object] += count
        return {"subject": dict(subject), "verb": dict(verb), "object": dict(object_)}

    @cached_property
    def sv_counts(self) -> dict[tuple[str, str], int]:
        out: Counter = Counter()
        for event, count in self.counts.items():
            out[(event.subject, event.verb)] += count
        return dict(out)

    @cached_property
    def vo_counts(self) -> dict[tuple[str, str], int]:
        out: Counter = Counter()
        for event, count in self.counts.items():
            out[(event.verb, event.object)] += count
        return dict(out)

    def verb_count(self, verb: str) -> int:
        return self.positional_counts["verb"].get(verb, 0)

    @cached_property
    def total(self) -> int:
        return sum(self.counts.values())

    @cached_property
    def vocabulary(self) -> frozenset[str]:
        words: set[str] = set()
        for event in self.counts:
            words.update(event.words())
        return frozenset(words)

    @cached_property
    def _samplers(self) -> dict[Position, tuple[list[str], list[int]]]:
        tables = {}
        for position, counts in self.positional_counts.items():
            words = sorted(counts)
            cumulative = list(np.cumsum([counts[w] for w in words]))
            tables[position] = (words, cumulative)
        return tables

    def sample_word(self, position: Position, rng: np.random.Generator) -> str:
        """Draw one word from the positional unigram distribution (probability
        proportional to raw positional count)."""
        words, cumulative = self._samplers[position]
        if not words:
            raise PerturbationError(f"no words in position {position}")
        total = cumulative[-1]
        u = rng.random() * total
        return words[bisect.bisect_right(cumulative, u)]


def apply_filters(
    raw: Iterable[Event] | dict[Event, int],
    min_triple_count: int = 2,
    min_word_count: int = 1000,
    per_triple_cap: int = 1000,
) -> TripleCorpus:
    """Cap per-event counts, then drop rare-word and rare-triple events.

    The word and triple filters are iterated to a fixed point so that
    re-filtering a filtered corpus with the same thresholds is the identity
    (removals lower positional counts, which can expose new violations).
    """
    if min(min_triple_count, min_word_count, per_triple_cap) < 0:
        raise ValueError("thresholds must be >= 0")
    counts = Counter(raw)  # mapping: copy counts; iterable: tally events
    counts = Counter({e: min(c, per_triple_cap) for e, c in counts.items() if min(c, per_triple_cap) > 0})
    while True:
        positional: dict[Position, Counter] = {
            "subject": Counter(), "verb": Counter(), "object": Counter(),
        }
        for event, count in counts.items():
            positional["subject"][event.subject] += count
            positional["verb"][event.verb] += count
            positional["object"][event.object] += count
        survivors = {
            event: count
            for event, count in counts.items()
            if positional["subject"][event.subject] >= min_word_count
            and positional["verb"][event.verb] >= min_word_count
            and positional["object"][event.object] >= min_word_count
        }
        survivors = {e: c for e, c in survivors.items() if c >= min_triple_count}
        if len(survivors) == len(counts):
            return TripleCorpus.from_counts(survivors)
        counts = Counter(survivors)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_negative(corpus: TripleCorpus, e: Event, rng) -> TrainingPair:
    """Perturb `e` into a pseudo-negative.

    The form is uniform over {S, O, SO}; replacements are drawn by positional
    occurrence frequency and redrawn (bounded) until they differ from the
    original word in every perturbed position.
    """
    if not corpus.counts:
        raise ValueError("corpus is empty")
    rng = _as_rng(rng)
    form: PerturbationForm = ("S", "O", "SO")[int(rng.integers(3))]

    def replacement(position: Position, original: str) -> str:
        for _ in range(NEGATIVE_RETRY_BOUND):
            word = corpus.sample_word(position, rng)
            if word != original:
                return word
        raise PerturbationError(
            f"could not draw a {position} different from {original!r} "
            f"within {NEGATIVE_RETRY_BOUND} tries"
        )

    subject = replacement("subject", e.subject) if form in ("S", "SO") else e.subject
    object_ = replacement("object", e.object) if form in ("O", "SO") else e.object
    return TrainingPair(positive=e, negative=Event(subject, e.verb, object_), perturbation_form=form)


def build_training_set(
    corpus: TripleCorpus,
    seed: int,
    stats: Optional[PairStats] = None,
) -> Iterator[TrainingPair]:
    """One pair per event occurrence, in seeded-shuffled order.

    Fully reproducible: the shuffle and the negative draw for occurrence i
    depend only on (seed, i), so generation may be sharded by index.
    """
    stats = stats if stats is not None else PairStats()
    occurrences: list[Event] = []
    for event in sorted(corpus.counts, key=Event.words):
        occurrences.extend([event] * corpus.counts[event])
    shuffle_rng = np.random.default_rng([seed, 0])
    order = shuffle_rng.permutation(len(occurrences))
    for i in order:
        event = occurrences[int(i)]
        pair_rng = np.random.default_rng([seed, 1, int(i)])
        try:
            pair = sample_negative(corpus, event, pair_rng)
        except PerturbationError:
            stats.unable_to_perturb += 1
            continue
        stats.pairs += 1
        yield pair


def write_corpus(fh, corpus: TripleCorpus, comments: tuple[str, ...] = ()) -> None:
    """`subject<TAB>verb<TAB>object<TAB>count` lines, sorted lexicographically.

    Output is bit-exact for identical counts, independent of insertion order.
    """
    for comment in comments:
        fh.write(f"# {comment}\n")
    for event in sorted(corpus.counts, key=Event.words):
        fh.write(f"{event.subject}\t{event.verb}\t{event.object}\t{corpus.counts[event]}\n")


def read_corpus(path) -> TripleCorpus:
    counts: dict[Event, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"corpus line {lineno}: expected 4 fields")
            s, v, o, count = parts
            try:
                n = int(count)
            except ValueError:
                raise ValueError(f"corpus line {lineno}: bad count {count!r}") from None
            if n < 1:
                raise ValueError(f"corpus line {lineno}: count must be >= 1")
            event = Event(s, v, o)
            if event in counts:
                raise ValueError(f"corpus line {lineno}: duplicate event {event}")
            counts[event] = n
    return TripleCorpus.from_counts(counts)
