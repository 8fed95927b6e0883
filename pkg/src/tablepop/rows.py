"""Candidate selection and probabilistic ranking of entities for new rows.

Candidates come from four sources: shared KB categories, shared KB types,
tables with a similar caption, and tables containing the seed entities.
Each candidate is then scored by the product of up to three components:

* entity similarity - a mixture of a KB estimate (seed-relation language
  model, or average pairwise link similarity) and a table co-occurrence
  estimate,
* label likelihood - a mixture of a Dirichlet-smoothed unigram model over
  heading-label words and an exact-label maximum-likelihood estimate,
* caption likelihood - a per-term mixture of a smoothed abstract language
  model and a caption co-occurrence estimate.

Disabled components contribute a neutral factor of 1, so any subset of the
model can be ranked on its own.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from .index import TableIndex
from .kb import KbStore
from .ranking import Suggestion, sort_suggestions
from .tables import SeedTable, normalize_label, tokenize

logger = logging.getLogger(__name__)

ROW_CANDIDATE_METHODS = ("categories", "types", "caption", "entities")
ROW_COMPONENTS = ("entity_similarity", "label_likelihood", "caption_likelihood")
KB_SIMILARITIES = ("relations", "wlm", "jaccard")

_SOFT_FLOOR = 1e-12


@dataclass(frozen=True, slots=True)
class RowCandidateConfig:
    """Which selection methods run, and each method's top-k cut-off."""

    methods: frozenset[str] = frozenset({"categories", "caption", "entities"})
    categories_k: int = 256
    types_k: int = 4096
    caption_k: int = 256
    entities_k: int = 256
    include_missing_abstract: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "methods", frozenset(self.methods))
        unknown = self.methods - set(ROW_CANDIDATE_METHODS)
        if unknown:
            raise ValueError(f"unknown candidate methods: {sorted(unknown)}")
        if not self.methods:
            raise ValueError("at least one candidate method must be enabled")
        for name in ("categories_k", "types_k", "caption_k", "entities_k"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True, slots=True)
class RowRankingConfig:
    components: frozenset[str] = frozenset(ROW_COMPONENTS)
    lambda_e: float = 0.5
    lambda_l: float = 0.5
    lambda_c: float = 0.5
    kb_similarity: str = "jaccard"
    mu_labels: float | None = None
    mu_captions: float | None = None
    soft_zero: bool = False
    kb_score_transform: Callable[[float], float] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", frozenset(self.components))
        unknown = self.components - set(ROW_COMPONENTS)
        if unknown:
            raise ValueError(f"unknown ranking components: {sorted(unknown)}")
        for name in ("lambda_e", "lambda_l", "lambda_c"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.kb_similarity not in KB_SIMILARITIES:
            raise ValueError(f"unknown kb_similarity {self.kb_similarity!r}")
        for name in ("mu_labels", "mu_captions"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be > 0")


def _eligible(entity: str, kb: KbStore | None, cfg: RowCandidateConfig) -> bool:
    # Default candidate pool mirrors a KB restricted to entities with abstracts.
    if kb is None or cfg.include_missing_abstract:
        return True
    rec = kb.get(entity)
    return rec is not None and rec.has_abstract


def select_row_candidates(
    seed: SeedTable,
    cfg: RowCandidateConfig,
    *,
    index: TableIndex,
    kb: KbStore | None = None,
) -> dict[str, tuple[str, ...]]:
    """Union of each enabled method's top-k candidates, seeds excluded.

    Returns candidate entity ids mapped to the sorted tuple of methods that
    proposed them (provenance for diagnostics).
    """
    seeds = set(seed.entities)
    found: dict[str, set[str]] = {}

    def propose(entity: str, method: str) -> None:
        if entity not in seeds and _eligible(entity, kb, cfg):
            found.setdefault(entity, set()).add(method)

    for prop, k in (("categories", cfg.categories_k), ("types", cfg.types_k)):
        if prop not in cfg.methods:
            continue
        if kb is None:
            raise ValueError(f"method {prop!r} requires a KB store")
        require_abstract = not cfg.include_missing_abstract
        for e in kb.top_candidates_by_overlap(
            seed.entities, prop, k, exclude=seeds, require_abstract=require_abstract
        ):
            propose(e, prop)
    if "caption" in cfg.methods:
        for hit in index.search("caption", tokenize(seed.caption), cfg.caption_k):
            for e in index.tables[hit.table_id].leftmost_entities():
                propose(e, "caption")
    if "entities" in cfg.methods:
        for hit in index.search("entities", list(seed.entities), cfg.entities_k):
            for e in index.tables[hit.table_id].leftmost_entities():
                propose(e, "entities")
    return {e: tuple(sorted(methods)) for e, methods in found.items()}


def kb_relation_similarity(entity: str, seeds: Sequence[str], *, kb: KbStore) -> float:
    """Probability mass of the candidate's relations under the seed-relation
    distribution: sum over the candidate's relation pairs of how many seeds
    share that pair, over the seeds' total relation count."""
    rec = kb[entity]
    seed_recs = [kb[s] for s in seeds]
    total = sum(len(r.relations) for r in seed_recs)
    if total == 0:
        logger.debug("seeds %s have no relations; relation similarity is 0", list(seeds))
        return 0.0
    matched = 0
    for pair in rec.relations:
        matched += sum(1 for r in seed_recs if pair in r.relations)
    return matched / total


def pairwise_link_similarity(e1: str, e2: str, method: str, *, kb: KbStore) -> float:
    """Link-overlap similarity of two entities: Jaccard over outgoing links,
    or the Milne-Witten link measure clamped to [0, 1] (0 for no overlap)."""
    links1 = kb[e1].outlinks
    links2 = kb[e2].outlinks
    inter = len(links1 & links2)
    if method == "jaccard":
        union = len(links1 | links2)
        return inter / union if union else 0.0
    if method == "wlm":
        if inter == 0 or not links1 or not links2:
            return 0.0
        larger = max(len(links1), len(links2))
        smaller = min(len(links1), len(links2))
        numerator = math.log(larger) - math.log(inter)
        if numerator == 0.0:
            return 1.0
        denominator = math.log(kb.total_entities) - math.log(smaller)
        if denominator <= 0.0:
            return 0.0
        return min(1.0, max(0.0, 1.0 - numerator / denominator))
    raise ValueError(f"unknown link similarity {method!r}")


def avg_pairwise_kb_similarity(
    entity: str, seeds: Sequence[str], method: str, *, kb: KbStore
) -> float:
    if not seeds:
        return 0.0
    return sum(pairwise_link_similarity(entity, s, method, kb=kb) for s in seeds) / len(seeds)


def tc_cooccurrence_similarity(entity: str, seeds: Sequence[str], *, index: TableIndex) -> float:
    """Fraction of the tables containing all seeds that also contain the
    candidate; 0 when no table contains all seeds."""
    denom = index.count_tables_with_all(seeds)
    if denom == 0:
        return 0.0
    return index.count_tables_with_all(set(seeds) | {entity}) / denom


def entity_similarity(
    entity: str,
    seeds: Sequence[str],
    cfg: RowRankingConfig,
    *,
    index: TableIndex,
    kb: KbStore,
) -> float:
    if cfg.kb_similarity == "relations":
        p_kb = kb_relation_similarity(entity, seeds, kb=kb)
    else:
        p_kb = avg_pairwise_kb_similarity(entity, seeds, cfg.kb_similarity, kb=kb)
    if cfg.kb_score_transform is not None:
        p_kb = cfg.kb_score_transform(p_kb)
    p_tc = tc_cooccurrence_similarity(entity, seeds, index=index)
    return cfg.lambda_e * p_kb + (1.0 - cfg.lambda_e) * p_tc


def label_likelihood(
    labels: Sequence[str],
    entity: str,
    cfg: RowRankingConfig,
    *,
    index: TableIndex,
) -> float:
    """Sum over seed labels of the smoothed-LM / exact-match mixture.

    Labels are tokenized for the language-model term and normalized for the
    exact-match term.  An empty label list is a neutral 1.
    """
    if not labels:
        return 1.0
    mu = cfg.mu_labels if cfg.mu_labels is not None else (index.stats.mean_entity_label_length or 1.0)
    term_tf = index.stats.heading_term_tf.get(entity, {})
    entity_len = index.stats.entity_label_length.get(entity, 0)
    n_entity = index.n_tables_with_entity(entity)
    total = 0.0
    for label in labels:
        lm = 1.0
        for t in tokenize(label):
            lm *= (term_tf.get(t, 0) + mu * index.background_label_prob(t)) / (entity_len + mu)
        em = (
            index.count_tables_with_entity_and_label(entity, normalize_label(label)) / n_entity
            if n_entity
            else 0.0
        )
        total += cfg.lambda_l * lm + ((1.0 - cfg.lambda_l) / len(labels)) * em
    return total


def caption_likelihood(
    caption: str,
    entity: str,
    cfg: RowRankingConfig,
    *,
    index: TableIndex,
    kb: KbStore,
) -> float:
    """Product over caption terms of the abstract-LM / caption co-occurrence
    mixture.  An empty caption is a neutral 1; an entity without an abstract
    falls back to the background model on the KB side."""
    terms = tokenize(caption)
    if not terms:
        return 1.0
    mu = cfg.mu_captions if cfg.mu_captions is not None else (kb.mean_abstract_length or 1.0)
    rec = kb.get(entity)
    abstract_tf = rec.abstract_tf if rec is not None else {}
    abstract_len = rec.abstract_len if rec is not None else 0
    caption_counts = index.stats.caption_term_tables.get(entity, {})
    n_entity = index.n_tables_with_entity(entity)
    product = 1.0
    for t in terms:
        p_kb = (abstract_tf.get(t, 0) + mu * kb.background_abstract_prob(t)) / (abstract_len + mu)
        p_tc = caption_counts.get(t, 0) / n_entity if n_entity else 0.0
        product *= cfg.lambda_c * p_kb + (1.0 - cfg.lambda_c) * p_tc
    return product


def rank_rows(
    seed: SeedTable,
    cand_cfg: RowCandidateConfig,
    rank_cfg: RowRankingConfig,
    *,
    index: TableIndex,
    kb: KbStore,
) -> list[Suggestion]:
    """Rank candidate entities by the product of the enabled components.

    Ordering is deterministic: non-increasing score with ties broken by
    ascending entity id.
    """
    candidates = select_row_candidates(seed, cand_cfg, index=index, kb=kb)
    seeds = list(seed.entities)
    out: list[Suggestion] = []
    for entity in sorted(candidates):
        components: dict[str, float] = {}
        if "entity_similarity" in rank_cfg.components:
            components["entity_similarity"] = entity_similarity(
                entity, seeds, rank_cfg, index=index, kb=kb
            )
        if "label_likelihood" in rank_cfg.components:
            components["label_likelihood"] = label_likelihood(
                seed.labels, entity, rank_cfg, index=index
            )
        if "caption_likelihood" in rank_cfg.components:
            components["caption_likelihood"] = caption_likelihood(
                seed.caption, entity, rank_cfg, index=index, kb=kb
            )
        score = 1.0
        for name in ROW_COMPONENTS:
            if name in components:
                factor = components[name]
                if rank_cfg.soft_zero:
                    factor = max(factor, _SOFT_FLOOR)
                score *= factor
        out.append(Suggestion(entity, score, components, sources=candidates[entity]))
    return sort_suggestions(out)
