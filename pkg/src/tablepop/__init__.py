"""Row and column population for entity-focused tables.

Given a seed table (caption, entities down the leftmost column, heading
labels), suggest ranked entities for new rows and ranked labels for new
columns, backed by a table corpus and a knowledge base.
"""

from .columns import (
    ColumnCandidateConfig,
    ColumnRankingConfig,
    acs_consistency,
    baseline_label_benefit,
    rank_columns,
    select_column_candidates,
)
from .evaluation import (
    EvaluationSplit,
    SimulatedCase,
    average_precision,
    make_split,
    reciprocal_rank,
    run_evaluation,
    simulate_case,
)
from .index import TableIndex, build_index, load_index, save_index
from .kb import EntityRecord, KbStore, load_kb, load_redirects
from .ranking import Suggestion
from .rows import (
    RowCandidateConfig,
    RowRankingConfig,
    rank_rows,
    select_row_candidates,
)
from .tables import (
    Cell,
    SeedTable,
    Table,
    classify_entity_focused,
    normalize_label,
    parse_corpus,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "Cell",
    "ColumnCandidateConfig",
    "ColumnRankingConfig",
    "EntityRecord",
    "EvaluationSplit",
    "KbStore",
    "RowCandidateConfig",
    "RowRankingConfig",
    "SeedTable",
    "SimulatedCase",
    "Suggestion",
    "Table",
    "TableIndex",
    "acs_consistency",
    "average_precision",
    "baseline_label_benefit",
    "build_index",
    "classify_entity_focused",
    "load_index",
    "load_kb",
    "load_redirects",
    "make_split",
    "normalize_label",
    "parse_corpus",
    "rank_columns",
    "rank_rows",
    "reciprocal_rank",
    "run_evaluation",
    "save_index",
    "select_column_candidates",
    "select_row_candidates",
    "simulate_case",
    "tokenize",
    "__version__",
]
