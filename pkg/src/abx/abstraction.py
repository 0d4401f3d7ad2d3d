"""Conceptual abstractions of an event and the grid of per-abstraction scores.

An event's subject and object are resolved to synsets and walked up their
shortest hypernym chains; the cross product of chain positions forms a grid.
Index 0 of each axis is the most abstract position (root side) and the last
position is always the sense-resolved original argument, even when the
original's own synset has been filtered out of the enumerable set -- the grid
must contain the original event at its bottom-right cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from .lexicon import Hierarchy, SenseMap, resolve_sense, shortest_chain

if TYPE_CHECKING:
    from .scorers.base import Scorer


@dataclass(frozen=True)
class Event:
    """Surface subject-verb-object triple (lower-cased lemmas)."""

    subject: str
    verb: str
    object: str

    def __post_init__(self):
        if not (self.subject and self.verb and self.object):
            raise ValueError(f"event fields must be non-empty: {self!r}")

    @staticmethod
    def normalized(subject: str, verb: str, object: str) -> "Event":
        return Event(subject.strip().lower(), verb.strip().lower(), object.strip().lower())

    def words(self) -> tuple[str, str, str]:
        return (self.subject, self.verb, self.object)


@dataclass(frozen=True)
class ConceptEvent:
    """Event with synset-typed arguments; None means the raw surface word."""

    subject_synset: Optional[str]
    verb: str
    object_synset: Optional[str]


class GridScoreError(RuntimeError):
    """Scorer failed on one grid cell; identifies the cell and the cause."""

    def __init__(self, row: int, col: int, event: Event, cause: BaseException):
        super().__init__(f"scorer failed at grid cell ({row}, {col}) for {event}: {cause}")
        self.row = row
        self.col = col
        self.event = event
        self.cause = cause


@dataclass(frozen=True)
class AbstractionPlan:
    """All abstraction cells of one event, row-major, plus the grid shape."""

    event: Event
    subject_ids: tuple[Optional[str], ...]
    object_ids: tuple[Optional[str], ...]
    cells: tuple[ConceptEvent, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.subject_ids), len(self.object_ids))


@dataclass(frozen=True)
class AbstractionGrid:
    """Matrix of logits over (subject chain position x object chain position)."""

    event: Event
    subject_ids: tuple[Optional[str], ...]
    object_ids: tuple[Optional[str], ...]
    subject_labels: tuple[str, ...]
    object_labels: tuple[str, ...]
    scores: np.ndarray  # shape (m, n), float64, finite

    @property
    def shape(self) -> tuple[int, int]:
        return self.scores.shape


def grid_positions(h: Hierarchy, synset_id: Optional[str]) -> tuple[Optional[str], ...]:
    """Abstraction positions for one argument, most abstract first.

    Enumerable proper ancestors along the shortest chain, then the resolved
    synset itself (kept unconditionally). None (no synset) degrades to the
    single surface-word position.
    """
    if synset_id is None:
        return (None,)
    chain = shortest_chain(h, synset_id)
    positions = [sid for sid in chain[:-1] if h.is_enumerable(sid)]
    positions.append(chain[-1])
    return tuple(positions)


def abstraction_events(h: Hierarchy, sm: SenseMap, e: Event) -> AbstractionPlan:
    """Enumerate the m x n ConceptEvents for every abstraction of `e`, row-major."""
    subj = resolve_sense(sm, h, e.subject, "subject")
    obj = resolve_sense(sm, h, e.object, "object")
    subject_ids = grid_positions(h, subj)
    object_ids = grid_positions(h, obj)
    cells = tuple(
        ConceptEvent(s_id, e.verb, o_id)
        for s_id in subject_ids
        for o_id in object_ids
    )
    return AbstractionPlan(event=e, subject_ids=subject_ids, object_ids=object_ids, cells=cells)


def render_cell(h: Hierarchy, original: Event, cell: ConceptEvent) -> Event:
    """Surface event for a cell: synsets are rendered by their lemma."""
    subject = h.lemma(cell.subject_synset) if cell.subject_synset is not None else original.subject
    object_ = h.lemma(cell.object_synset) if cell.object_synset is not None else original.object
    return Event(subject, cell.verb, object_)


def score_grid(scorer: "Scorer", h: Hierarchy, plan: AbstractionPlan) -> AbstractionGrid:
    """Score every cell of a plan. Cell order is row-major and deterministic."""
    m, n = plan.shape
    scores = np.empty((m, n), dtype=np.float64)
    for idx, cell in enumerate(plan.cells):
        i, j = divmod(idx, n)
        rendered = render_cell(h, plan.event, cell)
        try:
            value = float(scorer.logit(rendered))
        except Exception as exc:
            raise GridScoreError(i, j, rendered, exc) from exc
        if not np.isfinite(value):
            raise GridScoreError(i, j, rendered, ValueError(f"non-finite logit {value!r}"))
        scores[i, j] = value
    labels_s = tuple(
        h.lemma(sid) if sid is not None else plan.event.subject for sid in plan.subject_ids
    )
    labels_o = tuple(
        h.lemma(oid) if oid is not None else plan.event.object for oid in plan.object_ids
    )
    return AbstractionGrid(
        event=plan.event,
        subject_ids=plan.subject_ids,
        object_ids=plan.object_ids,
        subject_labels=labels_s,
        object_labels=labels_o,
        scores=scores,
    )


def grid_windows(scores) -> list[tuple[float, float, float]]:
    """Every contiguous length-3 window along both grid axes.

    Subject-ascending windows (object fixed) come first, then object-ascending
    windows (subject fixed). Axes shorter than 3 contribute nothing.
    """
    mat = np.asarray(scores, dtype=np.float64)
    if mat.ndim == 1:
        mat = mat.reshape(-1, 1)
    m, n = mat.shape
    windows: list[tuple[float, float, float]] = []
    for j in range(n):
        for i in range(m - 2):
            windows.append((mat[i, j], mat[i + 1, j], mat[i + 2, j]))
    for i in range(m):
        for j in range(n - 2):
            windows.append((mat[i, j], mat[i, j + 1], mat[i, j + 2]))
    return windows


def write_grid(fh, row_labels, col_labels, matrix, comments: tuple[str, ...] = ()) -> None:
    """Tab-separated grid export: `#` comments, a column-header line, one row per line.

    Cell values are written with repr so round-trip and byte determinism hold.
    """
    mat = np.asarray(matrix, dtype=np.float64)
    for comment in comments:
        fh.write(f"# {comment}\n")
    fh.write("\t" + "\t".join(col_labels) + "\n")
    for label, row in zip(row_labels, mat):
        fh.write(label + "\t" + "\t".join(repr(float(v)) for v in row) + "\n")


def read_grid(fh):
    """Inverse of write_grid: returns (row_labels, col_labels, matrix)."""
    rows: list[list[float]] = []
    row_labels: list[str] = []
    col_labels: Optional[list[str]] = None
    for lineno, raw in enumerate(fh, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if col_labels is None:
            if parts[0] != "":
                raise ValueError(f"grid line {lineno}: header must start with an empty field")
            col_labels = parts[1:]
            continue
        if len(parts) != len(col_labels) + 1:
            raise ValueError(f"grid line {lineno}: expected {len(col_labels) + 1} fields")
        row_labels.append(parts[0])
        try:
            rows.append([float(v) for v in parts[1:]])
        except ValueError as exc:
            raise ValueError(f"grid line {lineno}: {exc}") from exc
    if col_labels is None:
        raise ValueError("empty grid file")
    return row_labels, col_labels, np.asarray(rows, dtype=np.float64)
