"""Candidate selection and ranking of column heading labels.

Related tables retrieved by caption, label, or entity search act as
bridges: a candidate label's score is the sum, over retrieved tables
containing it, of that table's relevance.  Relevance is the product of up
to three factors: seed-entity coverage, normalized caption similarity, and
seed-label overlap.  The attribute-correlation baseline scores a candidate
by its mean pairwise co-occurrence consistency with the seed labels.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .index import TableIndex
from .ranking import Suggestion, sort_suggestions
from .tables import SeedTable, normalize_label, tokenize

COLUMN_CANDIDATE_METHODS = ("caption", "labels", "entities")
COLUMN_COMPONENTS = ("entities", "caption", "labels")
_FACTOR_DISPLAY = {"entities": "coverage", "caption": "caption", "labels": "label_overlap"}


@dataclass(frozen=True, slots=True)
class ColumnCandidateConfig:
    methods: frozenset[str] = frozenset(COLUMN_CANDIDATE_METHODS)
    caption_k: int = 256
    labels_k: int = 256
    entities_k: int = 64

    def __post_init__(self) -> None:
        object.__setattr__(self, "methods", frozenset(self.methods))
        unknown = self.methods - set(COLUMN_CANDIDATE_METHODS)
        if unknown:
            raise ValueError(f"unknown candidate methods: {sorted(unknown)}")
        if not self.methods:
            raise ValueError("at least one candidate method must be enabled")
        for name in ("caption_k", "labels_k", "entities_k"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True, slots=True)
class ColumnRankingConfig:
    components: frozenset[str] = frozenset(COLUMN_COMPONENTS)
    normalized_label_prior: bool = False
    caption_score_mode: str = "normalized"
    baseline: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", frozenset(self.components))
        unknown = self.components - set(COLUMN_COMPONENTS)
        if unknown:
            raise ValueError(f"unknown ranking components: {sorted(unknown)}")
        if self.caption_score_mode not in ("normalized", "raw"):
            raise ValueError(f"unknown caption_score_mode {self.caption_score_mode!r}")
        if self.baseline not in (None, "acsdb"):
            raise ValueError(f"unknown baseline {self.baseline!r}")


@dataclass(frozen=True, slots=True)
class CandidateTable:
    """A retrieved bridge table with its relevance factors.

    ``factors`` holds the enabled factors only; ``neutral`` names factors
    forced to 1 because the corresponding seed field was empty.
    """

    table_id: str
    sources: tuple[str, ...]
    factors: Mapping[str, float]
    neutral: tuple[str, ...] = ()

    @property
    def relevance(self) -> float:
        value = 1.0
        for name in COLUMN_COMPONENTS:
            if name in self.factors:
                value *= self.factors[name]
        return value


def select_column_candidates(
    seed: SeedTable,
    cfg: ColumnCandidateConfig,
    *,
    index: TableIndex,
) -> tuple[list[str], dict[str, tuple[str, ...]]]:
    """Candidate labels and bridge tables from the enabled searches.

    Returns the sorted candidate labels (normalized, seed labels excluded)
    and the retrieved table ids mapped to the methods that found them.
    """
    tables: dict[str, set[str]] = {}

    def retrieved(hits: Iterable, method: str) -> None:
        for hit in hits:
            tables.setdefault(hit.table_id, set()).add(method)

    if "caption" in cfg.methods:
        retrieved(index.search("caption", tokenize(seed.caption), cfg.caption_k), "caption")
    if "labels" in cfg.methods:
        query = list(dict.fromkeys(n for l in seed.labels if (n := normalize_label(l))))
        retrieved(index.search("labels", query, cfg.labels_k), "labels")
    if "entities" in cfg.methods:
        retrieved(index.search("entities", list(seed.entities), cfg.entities_k), "entities")

    seed_labels = seed.normalized_labels()
    labels = sorted(
        {l for tid in tables for l in index.tables[tid].normalized_labels()} - seed_labels
    )
    return labels, {tid: tuple(sorted(ms)) for tid, ms in tables.items()}


def _caption_scores(
    seed: SeedTable, table_ids: Sequence[str], *, index: TableIndex, mode: str
) -> dict[str, float]:
    """Caption BM25 score per candidate table, 0 when no term matches.

    In ``normalized`` mode scores are divided by the maximum among the
    candidate tables, mapping matches into (0, 1].
    """
    terms = tokenize(seed.caption)
    raw = index.searcher("caption").scores(terms)
    scores = {tid: raw.get(tid, 0.0) for tid in table_ids}
    if mode == "raw":
        return scores
    top = max(scores.values(), default=0.0)
    if top <= 0.0:
        return scores
    return {tid: s / top for tid, s in scores.items()}


def table_relevance_components(
    seed: SeedTable,
    tables: Mapping[str, tuple[str, ...]],
    *,
    index: TableIndex,
    components: frozenset[str] | set[str] = frozenset(COLUMN_COMPONENTS),
    caption_score_mode: str = "normalized",
) -> dict[str, CandidateTable]:
    """Relevance factors for each candidate table.

    A factor whose seed-side input is empty (no seed entities / empty
    caption / no seed labels) is neutral 1 and flagged as such.
    """
    seed_entities = set(seed.entities)
    seed_labels = seed.normalized_labels()
    table_ids = sorted(tables)
    caption_empty = not tokenize(seed.caption)
    caption_scores: dict[str, float] = {}
    if "caption" in components and not caption_empty:
        caption_scores = _caption_scores(
            seed, table_ids, index=index, mode=caption_score_mode
        )
    out: dict[str, CandidateTable] = {}
    for tid in table_ids:
        table = index.tables[tid]
        factors: dict[str, float] = {}
        neutral: list[str] = []
        if "entities" in components:
            if seed_entities:
                factors["entities"] = len(table.entity_set() & seed_entities) / len(seed_entities)
            else:
                factors["entities"] = 1.0
                neutral.append("entities")
        if "caption" in components:
            if caption_empty:
                factors["caption"] = 1.0
                neutral.append("caption")
            else:
                factors["caption"] = caption_scores[tid]
        if "labels" in components:
            if seed_labels:
                factors["labels"] = len(table.normalized_labels() & seed_labels) / len(seed_labels)
            else:
                factors["labels"] = 1.0
                neutral.append("labels")
        out[tid] = CandidateTable(
            table_id=tid,
            sources=tables[tid],
            factors=factors,
            neutral=tuple(neutral),
        )
    return out


def rank_columns(
    seed: SeedTable,
    cand_cfg: ColumnCandidateConfig,
    rank_cfg: ColumnRankingConfig | None = None,
    *,
    index: TableIndex,
) -> list[Suggestion]:
    """Rank candidate labels by summed bridge-table relevance.

    Each candidate label scores the sum, over retrieved tables containing
    it, of the product of the enabled relevance factors.  Ties break by
    ascending label.  The breakdown reports the strongest contributing
    table's factors plus the number of contributing tables.
    """
    cfg = rank_cfg if rank_cfg is not None else ColumnRankingConfig()
    if cfg.baseline == "acsdb":
        return rank_columns_acsdb(seed, cand_cfg, index=index)
    labels, tables = select_column_candidates(seed, cand_cfg, index=index)
    relevance = table_relevance_components(
        seed,
        tables,
        index=index,
        components=cfg.components,
        caption_score_mode=cfg.caption_score_mode,
    )
    by_label: dict[str, list[str]] = {l: [] for l in labels}
    for tid in sorted(tables):
        for l in index.tables[tid].normalized_labels():
            if l in by_label:
                by_label[l].append(tid)
    out: list[Suggestion] = []
    for label in labels:
        contributions: list[tuple[str, float]] = []
        for tid in by_label[label]:
            value = relevance[tid].relevance
            if cfg.normalized_label_prior:
                value /= len(index.tables[tid].normalized_labels())
            contributions.append((tid, value))
        score = math.fsum(v for _, v in contributions)
        best_tid, _ = min(contributions, key=lambda item: (-item[1], item[0]))
        best = relevance[best_tid]
        components = {
            _FACTOR_DISPLAY[name]: best.factors[name]
            for name in COLUMN_COMPONENTS
            if name in best.factors
        }
        components["n_tables"] = float(len(contributions))
        out.append(Suggestion(label, score, components, sources=best.sources))
    return sort_suggestions(out)


def acs_consistency(l1: str, l2: str, *, index: TableIndex) -> float:
    """Probability of seeing label l2 in a table given l1: the fraction of
    tables containing l1 that also contain l2.  Inputs are normalized."""
    a = normalize_label(l1)
    b = normalize_label(l2)
    n1 = index.n_tables_with_label(a)
    if n1 == 0:
        return 0.0
    return index.label_pair_count(a, b) / n1


def baseline_label_benefit(seed_labels: Sequence[str], candidate: str, *, index: TableIndex) -> float:
    """Mean consistency of adding the candidate to each distinct normalized
    seed label."""
    distinct = sorted({n for l in seed_labels if (n := normalize_label(l))})
    if not distinct:
        return 0.0
    return sum(acs_consistency(l, candidate, index=index) for l in distinct) / len(distinct)


def rank_columns_acsdb(
    seed: SeedTable,
    cand_cfg: ColumnCandidateConfig,
    *,
    index: TableIndex,
) -> list[Suggestion]:
    """Attribute-correlation baseline over the same candidate pipeline."""
    labels, _ = select_column_candidates(seed, cand_cfg, index=index)
    out = []
    for label in labels:
        benefit = baseline_label_benefit(seed.labels, label, index=index)
        out.append(Suggestion(label, benefit, {"label_benefit": benefit}))
    return sort_suggestions(out)
