#!/usr/bin/env python3
"""Walk one event through its abstraction grid, bare and max-wrapped.

Builds a nine-node toy taxonomy and a tiny count corpus over it, then scores
every abstraction cell of a single event twice: once with the raw n-gram
scorer and once wrapped with max-over-abstractions.  Prints both grids as
plausibility tables with chain labels, reports each grid's concavity gap and
local-extremum rate, and (optionally) writes the two grids as SVG heatmaps.

The wrapped grid is a running maximum along both axes, so its extremum rate
is zero by construction; the raw grid usually is not.  This script makes
that difference visible on something small enough to read.

Typical run:

    python3 scripts/consistency_demo.py --output-dir /tmp/demo
"""

from __future__ import annotations

import argparse
import os
import sys

from abx.abstraction import Event, abstraction_events, score_grid
from abx.aggregator import ConceptMaxScorer
from abx.corpus import TripleCorpus
from abx.heatmap import render_heatmap_svg
from abx.lexicon import SenseMap, build_hierarchy
from abx.mathutil import sigmoid
from abx.metrics import ccd, ler
from abx.scorers.ngram import NGramScorer

# entity branches into living things and stuff; events are attested at
# several levels so mid-chain cells get non-trivial counts.
TAXONOMY = [
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

# "animal eat food" dominates so mid-chain cells outscore their specific
# neighbours: the raw grid gets a ridge the wrapper must flatten.
CORPUS_COUNTS = {
    Event("animal", "eat", "food"): 20,
    Event("cat", "chase", "dog"): 2,
    Event("cat", "eat", "apple"): 4,
    Event("dog", "eat", "apple"): 5,
    Event("dog", "eat", "bread"): 3,
    Event("living", "eat", "stuff"): 1,
}


def print_grid(grid, probabilities) -> None:
    """Aligned plausibility table, subject chain down, object chain across."""
    width = max(len(label) for label in grid.subject_labels + grid.object_labels)
    width = max(width, 6)
    header = " " * width + "  " + "  ".join(f"{c:>{width}}" for c in grid.object_labels)
    print(header)
    for label, row in zip(grid.subject_labels, probabilities):
        cells = "  ".join(f"{p:>{width}.4f}" for p in row)
        print(f"{label:>{width}}  {cells}")


def report(tag: str, grid) -> None:
    probabilities = sigmoid(grid.scores)
    print(f"--- {tag} ---")
    print_grid(grid, probabilities)
    print(f"ccd={ccd([grid]):.4f}  ler={ler([grid]):.4f}")
    print()


def parse_args(argv):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--subject", default="dog")
    parser.add_argument("--verb", default="eat")
    parser.add_argument("--object", dest="object_", metavar="OBJECT", default="apple")
    parser.add_argument("--output-dir", help="also write one SVG heatmap per grid")
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)

    hierarchy = build_hierarchy(TAXONOMY)
    sense_map = SenseMap()
    scorer = NGramScorer.from_corpus(TripleCorpus.from_counts(CORPUS_COUNTS))
    wrapped = ConceptMaxScorer.build(scorer, hierarchy, sense_map, mode="inference")

    event = Event(args.subject, args.verb, args.object_)
    plan = abstraction_events(hierarchy, sense_map, event)
    print(f"event: {' '.join(event.words())}   grid shape: {plan.shape}")
    print()

    grids = {}
    for tag, active in (("raw", scorer), ("wrapped", wrapped)):
        grids[tag] = score_grid(active, hierarchy, plan)
        report(tag, grids[tag])

    if args.output_dir:
        os.makedirs(args.output_dir, exist_ok=True)
        for tag, grid in grids.items():
            path = os.path.join(args.output_dir, f"{tag}.svg")
            svg = render_heatmap_svg(
                grid.subject_labels,
                grid.object_labels,
                sigmoid(grid.scores),
                title=f"{' '.join(event.words())} ({tag})",
            )
            with open(path, "w", encoding="utf-8") as out:
                out.write(svg)
            print(f"heatmap -> {path}")

    return 0


if __name__ == "__main__":
    sys.exit(main())
