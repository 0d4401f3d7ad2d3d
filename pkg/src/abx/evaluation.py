"""End-to-end evaluation: ranking quality plus abstraction consistency.

Given a scorer and a labeled event set, this computes AUC over the
scorer's logits and builds one abstraction grid per event (scored by the
same scorer under evaluation, wrapped or not) for the consistency metrics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, TextIO

from .abstraction import AbstractionGrid, abstraction_events, score_grid
from .lexicon import Hierarchy, SenseMap
from .metrics import ConsistencyReport, LabeledEvent, auc, consistency_report
from .scorers.base import Scorer


@dataclass(frozen=True)
class EvalResult:
    auc: float
    consistency: ConsistencyReport
    n_plausible: int
    n_implausible: int
    scored: tuple[tuple[LabeledEvent, float], ...]
    grids: tuple[AbstractionGrid, ...]


def evaluate(
    scorer: Scorer,
    hierarchy: Hierarchy,
    sense_map: SenseMap,
    labeled: Sequence[LabeledEvent],
) -> EvalResult:
    scored = tuple((le, scorer.logit(le.event)) for le in labeled)
    grids = tuple(
        score_grid(scorer, hierarchy, abstraction_events(hierarchy, sense_map, le.event))
        for le in labeled
    )
    n_plausible = sum(1 for le in labeled if le.plausible)
    return EvalResult(
        auc=auc(scored),
        consistency=consistency_report(grids),
        n_plausible=n_plausible,
        n_implausible=len(labeled) - n_plausible,
        scored=scored,
        grids=grids,
    )


def write_report_kv(fh: TextIO, result: EvalResult, scorer_name: str, seed: int) -> None:
    """Machine-readable report: one key<TAB>value pair per line."""
    rows = [
        ("scorer", scorer_name),
        ("seed", str(seed)),
        ("auc", repr(result.auc)),
        ("ccd", repr(result.consistency.ccd)),
        ("ler", repr(result.consistency.ler)),
        ("window_count", str(result.consistency.window_count)),
        ("n_plausible", str(result.n_plausible)),
        ("n_implausible", str(result.n_implausible)),
    ]
    for key, value in rows:
        fh.write(f"{key}\t{value}\n")


def format_report_table(result: EvalResult, scorer_name: str) -> str:
    """Small fixed-width table for terminal output."""
    rows = [
        ("scorer", scorer_name),
        ("events", f"{result.n_plausible} plausible / {result.n_implausible} implausible"),
        ("auc", f"{result.auc:.4f}"),
        ("ccd", f"{result.consistency.ccd:.4f}"),
        ("ler", f"{result.consistency.ler:.4f}"),
        ("windows", str(result.consistency.window_count)),
    ]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)
