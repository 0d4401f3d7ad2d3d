"""Inconsistency metrics over abstraction grids and rank-based AUC.

Consistency metrics are computed over plausibilities (the logistic of the
grid's logits), matching the 0-1 scale the grids are reported on; AUC is rank
based, so either domain gives the same value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .abstraction import AbstractionGrid, Event, grid_windows
from .mathutil import sigmoid


class UndefinedAucError(ValueError):
    """AUC is undefined when one of the two classes is empty."""


@dataclass(frozen=True)
class LabeledEvent:
    event: Event
    plausible: bool


@dataclass(frozen=True)
class GridBreakdown:
    event: Event
    ccd: float
    ler: float
    window_count: int


@dataclass(frozen=True)
class ConsistencyReport:
    ccd: float
    ler: float
    window_count: int
    per_event: tuple[GridBreakdown, ...]


def concavity_delta(a_prev: float, a_mid: float, a_next: float) -> float:
    """Divergence from concavity of one window; 0 when the window is concave.

    Equality (2*a_mid == a_prev + a_next) counts as concave-compliant.
    """
    if 2.0 * a_mid < a_prev + a_next:
        return 0.5 * (a_prev + a_next) - a_mid
    return 0.0


def is_local_extremum(a_prev: float, a_mid: float, a_next: float) -> bool:
    """Strict local extremum test; plateaus are not extrema."""
    return a_mid > max(a_prev, a_next) or a_mid < min(a_prev, a_next)


def _probability_matrix(grid) -> np.ndarray:
    if isinstance(grid, AbstractionGrid):
        return sigmoid(grid.scores)
    return np.asarray(grid, dtype=np.float64)


def ccd(grids: Iterable) -> float:
    """Mean concavity delta pooled over every window of every grid.

    AbstractionGrids are mapped to plausibilities first; raw arrays are used
    as-is. Returns 0 when no windows exist.
    """
    total = 0.0
    count = 0
    for grid in grids:
        for window in grid_windows(_probability_matrix(grid)):
            total += concavity_delta(*window)
            count += 1
    # float(): windows carry numpy scalars, and their repr must not leak
    # into the key-value reports
    return float(total / count) if count else 0.0


def ler(grids: Iterable) -> float:
    """Fraction of windows whose middle value is a strict local extremum."""
    extrema = 0
    count = 0
    for grid in grids:
        for window in grid_windows(_probability_matrix(grid)):
            if is_local_extremum(*window):
                extrema += 1
            count += 1
    return extrema / count if count else 0.0


def consistency_report(grids: Sequence[AbstractionGrid]) -> ConsistencyReport:
    """Pooled CCD/LER over all grids plus a per-event breakdown."""
    total_delta = 0.0
    total_extrema = 0
    total_windows = 0
    breakdown = []
    for grid in grids:
        windows = grid_windows(_probability_matrix(grid))
        delta = sum(concavity_delta(*w) for w in windows)
        extrema = sum(1 for w in windows if is_local_extremum(*w))
        n = len(windows)
        breakdown.append(GridBreakdown(
            event=grid.event,
            ccd=float(delta / n) if n else 0.0,
            ler=extrema / n if n else 0.0,
            window_count=n,
        ))
        total_delta += delta
        total_extrema += extrema
        total_windows += n
    return ConsistencyReport(
        ccd=float(total_delta / total_windows) if total_windows else 0.0,
        ler=total_extrema / total_windows if total_windows else 0.0,
        window_count=total_windows,
        per_event=tuple(breakdown),
    )


def tied_ranks(values) -> np.ndarray:
    """1-based ranks with ties sharing their group's average rank."""
    x = np.asarray(values, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    sx = x[order]
    boundaries = np.flatnonzero(np.r_[True, sx[1:] != sx[:-1], True])
    counts = np.diff(boundaries)
    group_avg = (boundaries[:-1] + boundaries[1:] + 1) / 2.0
    ranks = np.empty(len(x), dtype=np.float64)
    ranks[order] = np.repeat(group_avg, counts)
    return ranks


def auc_from_scores(labels, scores) -> float:
    """Rank-sum AUC with half credit for ties, O(N log N).

    `labels` is truthy for the positive (plausible) class. Raises
    UndefinedAucError when only one class is present.
    """
    y = np.asarray(labels, dtype=bool)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape or y.ndim != 1:
        raise ValueError("labels and scores must be 1-D and the same length")
    n_pos = int(y.sum())
    n_neg = int(len(y) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAucError(f"need both classes, got {n_pos} positive / {n_neg} negative")
    ranks = tied_ranks(s)
    pos_rank_sum = float(ranks[y].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def auc(scored: Iterable[tuple[LabeledEvent, float]]) -> float:
    """AUC over (labeled event, logit) pairs."""
    items = list(scored)
    labels = [le.plausible for le, _ in items]
    scores = [score for _, score in items]
    return auc_from_scores(labels, scores)


def load_labeled_events(path) -> list[LabeledEvent]:
    """Read `subject<TAB>verb<TAB>object<TAB>label` lines, label in {1, 0}."""
    out: list[LabeledEvent] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"labeled events line {lineno}: expected 4 fields")
            s, v, o, label = parts
            if label not in ("0", "1"):
                raise ValueError(f"labeled events line {lineno}: label must be 0 or 1")
            out.append(LabeledEvent(Event.normalized(s, v, o), plausible=label == "1"))
    return out
