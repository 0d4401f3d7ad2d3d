"""Command-line entry points.

Subcommands cover the full pipeline: triple extraction from dependency
parses, corpus filtering, scorer training, event scoring, abstraction-grid
export, evaluation (AUC + consistency metrics), and heatmap rendering.

Exit codes: 0 success, 1 internal error, 2 bad input (files, formats,
flags), 3 external scorer protocol failure.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import re
import sys
import traceback

from .abstraction import Event, GridScoreError, score_grid, write_grid, read_grid
from .aggregator import AbstractionSampler, ConceptMaxScorer, DEFAULT_TRAIN_SAMPLE_COUNT
from .corpus import (
    ExtractionStats,
    MalformedConlluError,
    PairStats,
    apply_filters,
    build_training_set,
    extract_triples,
    read_corpus,
    write_corpus,
)
from .evaluation import evaluate, format_report_table, write_report_kv
from .heatmap import render_heatmap_svg
from .lexicon import SenseMap, filter_hierarchy, load_hierarchy
from .mathutil import sigmoid
from .metrics import load_labeled_events
from .scorers import (
    ConstantScorer,
    ExternalScorer,
    ExternalScorerError,
    MlpScorer,
    NGramScorer,
    TrainConfig,
    load_model,
    save_model,
    train,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_EXTERNAL = 3

DEFAULT_MIN_WORD_COUNT = 1000
DEFAULT_MIN_TRIPLE_COUNT = 2
DEFAULT_PER_TRIPLE_CAP = 1000
DEFAULT_MIN_DEPTH = 4


class UsageError(ValueError):
    """Flag combinations argparse alone cannot express."""


# --- shared flag groups ----------------------------------------------------


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="run seed (default 0)")


def _add_threshold_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--min-word-count",
        type=int,
        default=DEFAULT_MIN_WORD_COUNT,
        help=f"minimum per-position word frequency (default {DEFAULT_MIN_WORD_COUNT})",
    )
    parser.add_argument(
        "--min-triple-count",
        type=int,
        default=DEFAULT_MIN_TRIPLE_COUNT,
        help=f"minimum triple frequency (default {DEFAULT_MIN_TRIPLE_COUNT})",
    )
    parser.add_argument(
        "--cap",
        type=int,
        default=DEFAULT_PER_TRIPLE_CAP,
        help=f"per-triple count cap applied first (default {DEFAULT_PER_TRIPLE_CAP})",
    )


def _add_scorer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--scorer",
        required=True,
        help="ngram | mlp | external:<command> | constant:<logit>",
    )
    parser.add_argument("--corpus", help="corpus TSV (required for --scorer ngram)")
    parser.add_argument("--model", help="trained model file (required for --scorer mlp)")
    parser.add_argument(
        "--conceptmax",
        action="store_true",
        help="wrap the scorer: logit = max over all abstraction cells",
    )


def _add_hierarchy_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument(
        "--hierarchy", required=required, help="hypernym edge-list file"
    )
    parser.add_argument(
        "--sense-map", help="word/role -> synset TSV (optional; lemma fallback otherwise)"
    )
    parser.add_argument(
        "--min-depth",
        type=int,
        default=DEFAULT_MIN_DEPTH,
        help=f"drop synsets shallower than this from grids (default {DEFAULT_MIN_DEPTH})",
    )
    parser.add_argument(
        "--vocab-corpus",
        help="corpus whose vocabulary restricts grid synsets "
        "(default: the scorer's own vocabulary when it has one)",
    )


# --- scorer construction ---------------------------------------------------


def _build_base_scorer(args, stack: contextlib.ExitStack):
    spec = args.scorer
    if spec == "ngram":
        if not args.corpus:
            raise UsageError("--scorer ngram requires --corpus")
        return NGramScorer.from_corpus(read_corpus(args.corpus))
    if spec == "mlp":
        if not args.model:
            raise UsageError("--scorer mlp requires --model")
        return load_model(args.model)
    if spec.startswith("external:"):
        command = spec.split(":", 1)[1]
        if not command.strip():
            raise UsageError("external scorer command is empty")
        return stack.enter_context(ExternalScorer(command))
    if spec.startswith("constant:"):
        try:
            return ConstantScorer(float(spec.split(":", 1)[1]))
        except ValueError:
            raise UsageError(f"bad constant scorer spec {spec!r}") from None
    raise UsageError(f"unknown scorer {spec!r}")


def _grid_vocabulary(args, scorer) -> set[str]:
    """Vocabulary used to restrict enumerable synsets, mirroring training."""
    if args.vocab_corpus:
        return read_corpus(args.vocab_corpus).vocabulary
    if isinstance(scorer, MlpScorer):
        vocab: set[str] = set()
        for position_vocab in scorer.vocabs.values():
            vocab.update(position_vocab)
        return vocab
    if args.corpus:
        return read_corpus(args.corpus).vocabulary
    raise UsageError(
        "no vocabulary source for grid filtering; pass --vocab-corpus "
        "(or --corpus, or use an mlp scorer)"
    )


def _load_grid_context(args, scorer):
    hierarchy = filter_hierarchy(
        load_hierarchy(args.hierarchy), args.min_depth, _grid_vocabulary(args, scorer)
    )
    sense_map = (
        SenseMap.load(args.sense_map, hierarchy) if args.sense_map else SenseMap()
    )
    return hierarchy, sense_map


def _wrap_if_requested(args, scorer, hierarchy, sense_map):
    if not getattr(args, "conceptmax", False):
        return scorer
    return ConceptMaxScorer.build(
        scorer, hierarchy, sense_map, mode="inference", seed=args.seed
    )


# --- subcommands ------------------------------------------------------------


def cmd_extract(args) -> None:
    stats = ExtractionStats()
    on_malformed = "skip" if args.skip_malformed else "raise"
    if args.input == "-":
        events = extract_triples(sys.stdin, stats=stats, on_malformed=on_malformed)
        corpus = apply_filters(
            events,
            min_triple_count=args.min_triple_count,
            min_word_count=args.min_word_count,
            per_triple_cap=args.cap,
        )
    else:
        with open(args.input, encoding="utf-8") as fh:
            events = extract_triples(fh, stats=stats, on_malformed=on_malformed)
            corpus = apply_filters(
                events,
                min_triple_count=args.min_triple_count,
                min_word_count=args.min_word_count,
                per_triple_cap=args.cap,
            )
    with open(args.output, "w", encoding="utf-8") as out:
        write_corpus(out, corpus)
    print(
        f"sentences={stats.sentences} extracted={stats.extracted} "
        f"no_triple={stats.no_triple} malformed={stats.malformed} "
        f"kept_triples={len(corpus.counts)}",
        file=sys.stderr,
    )


def cmd_filter(args) -> None:
    corpus = read_corpus(args.input)
    filtered = apply_filters(
        corpus.counts,
        min_triple_count=args.min_triple_count,
        min_word_count=args.min_word_count,
        per_triple_cap=args.cap,
    )
    with open(args.output, "w", encoding="utf-8") as out:
        write_corpus(out, filtered)
    print(
        f"triples_in={len(corpus.counts)} triples_out={len(filtered.counts)}",
        file=sys.stderr,
    )


def cmd_train(args) -> None:
    corpus = read_corpus(args.corpus)
    cfg = TrainConfig(
        embedding_dim=args.embedding_dim,
        hidden_dim=args.hidden_dim,
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        epochs=args.epochs,
        warmup_steps=args.warmup_steps,
        seed=args.seed,
    )
    wrapper = None
    if args.conceptmax:
        if not args.hierarchy:
            raise UsageError("--conceptmax training requires --hierarchy")
        hierarchy = filter_hierarchy(
            load_hierarchy(args.hierarchy), args.min_depth, corpus.vocabulary
        )
        sense_map = (
            SenseMap.load(args.sense_map, hierarchy) if args.sense_map else SenseMap()
        )
        wrapper = AbstractionSampler(
            hierarchy, sense_map, sample_count=args.train_samples, seed=args.seed
        )
    pair_stats = PairStats()
    pairs = build_training_set(corpus, args.seed, stats=pair_stats)
    result = train(pairs, cfg, corpus, wrapper=wrapper)
    save_model(args.output, result.scorer)
    for epoch, loss in enumerate(result.epoch_losses, start=1):
        print(f"epoch {epoch}: loss {loss:.6f}", file=sys.stderr)
    print(
        f"pairs={pair_stats.pairs} unable_to_perturb={pair_stats.unable_to_perturb} "
        f"model={args.output}",
        file=sys.stderr,
    )


def _read_events(path) -> list[Event]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"events line {lineno}: expected 3 tab-separated fields")
            events.append(Event(*parts))
    return events


def cmd_score(args) -> None:
    with contextlib.ExitStack() as stack:
        scorer = _build_base_scorer(args, stack)
        if args.conceptmax:
            if not args.hierarchy:
                raise UsageError("--conceptmax requires --hierarchy")
            hierarchy, sense_map = _load_grid_context(args, scorer)
            scorer = _wrap_if_requested(args, scorer, hierarchy, sense_map)
        events = _read_events(args.events)
        with open(args.output, "w", encoding="utf-8") as out:
            out.write(f"# scorer: {scorer.name}\n")
            out.write(f"# seed: {args.seed}\n")
            out.write("# subject\tverb\tobject\tlogit\tplausibility\n")
            for event in events:
                z = scorer.logit(event)
                out.write(
                    f"{event.subject}\t{event.verb}\t{event.object}\t"
                    f"{z!r}\t{float(sigmoid(z))!r}\n"
                )
    print(f"scored {len(events)} events -> {args.output}", file=sys.stderr)


def cmd_grid(args) -> None:
    event = Event(args.subject, args.verb, args.object)
    with contextlib.ExitStack() as stack:
        scorer = _build_base_scorer(args, stack)
        hierarchy, sense_map = _load_grid_context(args, scorer)
        scorer = _wrap_if_requested(args, scorer, hierarchy, sense_map)
        sampler = AbstractionSampler(hierarchy, sense_map)
        grid = score_grid(scorer, hierarchy, sampler.plan(event))
        probabilities = sigmoid(grid.scores)
        with open(args.output, "w", encoding="utf-8") as out:
            write_grid(
                out,
                grid.subject_labels,
                grid.object_labels,
                probabilities,
                comments=(
                    f"event: {event.subject} {event.verb} {event.object}",
                    f"scorer: {scorer.name}",
                    f"seed: {args.seed}",
                    "values: plausibility (logistic of the scorer logit)",
                ),
            )
    print(f"grid {grid.shape[0]}x{grid.shape[1]} -> {args.output}", file=sys.stderr)


def _slug(text: str) -> str:
    return re.sub(r"[^a-z0-9_-]+", "-", text.lower()).strip("-") or "event"


def cmd_eval(args) -> None:
    labeled = load_labeled_events(args.events)
    with contextlib.ExitStack() as stack:
        scorer = _build_base_scorer(args, stack)
        hierarchy, sense_map = _load_grid_context(args, scorer)
        scorer = _wrap_if_requested(args, scorer, hierarchy, sense_map)
        result = evaluate(scorer, hierarchy, sense_map, labeled)
        with open(args.report, "w", encoding="utf-8") as out:
            write_report_kv(out, result, scorer.name, args.seed)
        for directory in (args.grids_dir, args.heatmaps_dir):
            if directory:
                os.makedirs(directory, exist_ok=True)
        if args.grids_dir or args.heatmaps_dir:
            for i, grid in enumerate(result.grids):
                name = f"{i:04d}_{_slug('_'.join(grid.event.words()))}"
                probabilities = sigmoid(grid.scores)
                if args.grids_dir:
                    path = os.path.join(args.grids_dir, name + ".tsv")
                    with open(path, "w", encoding="utf-8") as out:
                        write_grid(
                            out,
                            grid.subject_labels,
                            grid.object_labels,
                            probabilities,
                            comments=(
                                f"event: {' '.join(grid.event.words())}",
                                f"scorer: {scorer.name}",
                                f"seed: {args.seed}",
                            ),
                        )
                if args.heatmaps_dir:
                    path = os.path.join(args.heatmaps_dir, name + ".svg")
                    svg = render_heatmap_svg(
                        grid.subject_labels,
                        grid.object_labels,
                        probabilities,
                        title=" ".join(grid.event.words()),
                    )
                    with open(path, "w", encoding="utf-8") as out:
                        out.write(svg)
    print(format_report_table(result, scorer.name))


def cmd_heatmap(args) -> None:
    with open(args.input, encoding="utf-8") as fh:
        row_labels, col_labels, matrix = read_grid(fh)
    svg = render_heatmap_svg(row_labels, col_labels, matrix, title=args.title)
    with open(args.output, "w", encoding="utf-8") as out:
        out.write(svg)
    print(f"heatmap -> {args.output}", file=sys.stderr)


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abx",
        description="Event plausibility scoring with abstraction-consistency metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract subject-verb-object triples from CoNLL-U")
    p.add_argument("input", help="CoNLL-U file, or - for stdin")
    p.add_argument("--output", required=True, help="corpus TSV to write")
    _add_threshold_flags(p)
    p.add_argument(
        "--skip-malformed",
        action="store_true",
        help="tally malformed sentences instead of failing on the first one",
    )
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("filter", help="re-apply frequency filters to a corpus")
    p.add_argument("input", help="corpus TSV")
    p.add_argument("--output", required=True)
    _add_threshold_flags(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("train", help="train the neural scorer on a corpus")
    p.add_argument("--corpus", required=True, help="training corpus TSV")
    p.add_argument("--output", required=True, help="model file to write")
    p.add_argument("--embedding-dim", type=int, default=64)
    p.add_argument("--hidden-dim", type=int, default=128)
    p.add_argument("--learning-rate", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--epochs", type=int, default=2)
    p.add_argument("--warmup-steps", type=int, default=1000)
    p.add_argument(
        "--conceptmax",
        action="store_true",
        help="train through a LogSumExp over sampled abstractions",
    )
    p.add_argument(
        "--train-samples",
        type=int,
        default=DEFAULT_TRAIN_SAMPLE_COUNT,
        help="abstractions sampled per event for --conceptmax training",
    )
    _add_hierarchy_flags(p, required=False)
    _add_seed(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="score events from a TSV file")
    _add_scorer_flags(p)
    p.add_argument("--events", required=True, help="subject/verb/object TSV")
    p.add_argument("--output", required=True)
    _add_hierarchy_flags(p, required=False)
    _add_seed(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("grid", help="export one event's abstraction grid")
    p.add_argument("subject")
    p.add_argument("verb")
    p.add_argument("object")
    _add_scorer_flags(p)
    p.add_argument("--output", required=True)
    _add_hierarchy_flags(p, required=True)
    _add_seed(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("eval", help="AUC + consistency metrics over labeled events")
    _add_scorer_flags(p)
    p.add_argument("--events", required=True, help="labeled events TSV (label 1|0)")
    p.add_argument("--report", required=True, help="key-value report file to write")
    p.add_argument("--grids-dir", help="write one probability grid TSV per event")
    p.add_argument("--heatmaps-dir", help="write one SVG heatmap per event")
    _add_hierarchy_flags(p, required=True)
    _add_seed(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("heatmap", help="render a grid TSV as an SVG heatmap")
    p.add_argument("input", help="grid TSV (as written by grid/eval)")
    p.add_argument("--output", required=True)
    p.add_argument("--title", default="")
    p.set_defaults(func=cmd_heatmap)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
        return EXIT_OK
    except GridScoreError as exc:
        code = EXIT_EXTERNAL if isinstance(exc.__cause__, ExternalScorerError) else EXIT_INPUT
        print(f"abx: error: {exc}", file=sys.stderr)
        return code
    except ExternalScorerError as exc:
        print(f"abx: error: {exc}", file=sys.stderr)
        return EXIT_EXTERNAL
    except MalformedConlluError as exc:
        print(f"abx: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError, LookupError) as exc:
        print(f"abx: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
