"""Event plausibility scoring that stays consistent across noun abstractions.

The package scores subject-verb-object events for plausibility, lifts each
event onto a grid of hypernym abstractions, and measures how coherently a
scorer behaves along those abstraction chains.
"""

from .abstraction import (
    AbstractionGrid,
    AbstractionPlan,
    ConceptEvent,
    Event,
    GridScoreError,
    abstraction_events,
    grid_positions,
    grid_windows,
    render_cell,
    score_grid,
)
from .aggregator import AbstractionSampler, ConceptMaxScorer
from .corpus import (
    MalformedConlluError,
    PerturbationError,
    TrainingPair,
    TripleCorpus,
    apply_filters,
    build_training_set,
    extract_triples,
    read_corpus,
    sample_negative,
    write_corpus,
)
from .lexicon import (
    Hierarchy,
    HierarchyError,
    SenseMap,
    Synset,
    UnknownSynsetError,
    build_hierarchy,
    enumerable_chain,
    filter_hierarchy,
    load_hierarchy,
    resolve_sense,
    shortest_chain,
)
from .metrics import (
    ConsistencyReport,
    LabeledEvent,
    UndefinedAucError,
    auc,
    auc_from_scores,
    ccd,
    concavity_delta,
    consistency_report,
    is_local_extremum,
    ler,
    load_labeled_events,
    tied_ranks,
)

__version__ = "0.1.0"
