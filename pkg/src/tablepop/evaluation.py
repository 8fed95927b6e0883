"""Simulation-based evaluation: splits, seeded cases, MAP/MRR reports.

The protocol starts from complete entity-focused tables.  For the row task,
the entities of the first i rows (i in 1..5) become seeds and the remaining
entities are ground truth; for the column task, the first j heading labels
(j in 1..3) become seeds and the remaining labels, normalized and
deduplicated, are ground truth.  Validation and test tables must have been
excluded from the index the run is scored against.

Reports are plain dicts with a canonical JSON rendering so identical runs
are byte-identical.
"""

from __future__ import annotations

import json
import logging
import math
import random
from collections.abc import Iterable, Mapping, Sequence, Set
from dataclasses import dataclass

from .columns import (
    ColumnCandidateConfig,
    ColumnRankingConfig,
    rank_columns,
    select_column_candidates,
)
from .index import TableIndex
from .kb import KbStore
from .rows import RowCandidateConfig, RowRankingConfig, rank_rows, select_row_candidates
from .tables import SeedTable, Table, classify_entity_focused, normalize_label

logger = logging.getLogger(__name__)

REPORT_FORMAT_VERSION = 1
ROW_SEED_SIZES = (1, 2, 3, 4, 5)
COLUMN_SEED_SIZES = (1, 2, 3)
DEFAULT_DEPTH = 1000


@dataclass(frozen=True, slots=True)
class EvaluationSplit:
    """Disjoint validation/test table ids for one task, drawn with one seed."""

    task: str
    rng_seed: int
    validation: tuple[str, ...]
    test: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.task not in ("rows", "columns"):
            raise ValueError(f"unknown task {self.task!r}")
        if set(self.validation) & set(self.test):
            raise ValueError("validation and test sets overlap")

    def excluded(self) -> frozenset[str]:
        return frozenset(self.validation) | frozenset(self.test)

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "rng_seed": self.rng_seed,
            "validation": list(self.validation),
            "test": list(self.test),
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> EvaluationSplit:
        return cls(
            task=obj["task"],
            rng_seed=int(obj["rng_seed"]),
            validation=tuple(obj["validation"]),
            test=tuple(obj["test"]),
        )


@dataclass(frozen=True, slots=True)
class SimulatedCase:
    seed: SeedTable
    ground_truth: frozenset[str]
    seed_size: int


def make_split(
    tables: Iterable[Table],
    task: str,
    rng_seed: int,
    size: int = 1000,
    *,
    min_rows: int = 6,
    min_extra_cols: int = 3,
) -> EvaluationSplit:
    """Draw disjoint validation/test sets of qualifying entity-focused tables.

    The draw is deterministic for a given (rng_seed, task) pair; row and
    column tasks with the same seed yield different selections.
    """
    qualifying = sorted(
        t.id for t in tables if classify_entity_focused(t, min_rows, min_extra_cols)
    )
    if len(qualifying) < 2 * size:
        raise ValueError(
            f"need at least {2 * size} qualifying tables for size={size}, "
            f"found {len(qualifying)}"
        )
    rng = random.Random(f"{rng_seed}:{task}")
    rng.shuffle(qualifying)
    return EvaluationSplit(
        task=task,
        rng_seed=rng_seed,
        validation=tuple(sorted(qualifying[:size])),
        test=tuple(sorted(qualifying[size : 2 * size])),
    )


def simulate_case(table: Table, task: str, size: int) -> SimulatedCase:
    """Split a complete table into a seed table and ground truth.

    Row task: seeds are the first ``size`` entities, all labels and the
    caption are kept, truth is the remaining entities.  Column task: seeds
    are the first ``size`` raw labels, all entities and the caption are
    kept, truth is the remaining labels normalized and deduplicated (minus
    any label that normalizes to a seed label).
    """
    if task == "rows":
        entities = [c.entity for c in table.leftmost_cells()]
        if any(e is None for e in entities):
            raise ValueError(f"table {table.id!r} is not entity-focused")
        if size < 1 or size >= len(entities):
            raise ValueError(
                f"seed size {size} out of range for {len(entities)} rows"
            )
        seed = SeedTable(
            caption=table.caption,
            entities=tuple(entities[:size]),
            labels=table.headings,
        )
        return SimulatedCase(seed, frozenset(entities[size:]), size)
    if task == "columns":
        if size < 1 or size >= table.n_cols:
            raise ValueError(
                f"seed size {size} out of range for {table.n_cols} columns"
            )
        seed = SeedTable(
            caption=table.caption,
            entities=table.leftmost_entities(),
            labels=table.headings[:size],
        )
        truth = {
            n for h in table.headings[size:] if (n := normalize_label(h))
        } - seed.normalized_labels()
        return SimulatedCase(seed, frozenset(truth), size)
    raise ValueError(f"unknown task {task!r}")


def average_precision(ranked: Sequence[str], truth: Set[str]) -> float:
    """Binary average precision with the ground-truth size as denominator.

    Duplicate occurrences of a relevant item count once, at their first
    position.
    """
    if not truth:
        raise ValueError("ground truth must be non-empty")
    hits = 0
    total = 0.0
    seen: set[str] = set()
    for position, key in enumerate(ranked, start=1):
        if key in truth and key not in seen:
            seen.add(key)
            hits += 1
            total += hits / position
    return total / len(truth)


def reciprocal_rank(ranked: Sequence[str], truth: Set[str]) -> float:
    if not truth:
        raise ValueError("ground truth must be non-empty")
    for position, key in enumerate(ranked, start=1):
        if key in truth:
            return 1.0 / position
    return 0.0


def dedupe_normalized_labels(ranked: Sequence[str]) -> list[str]:
    """Normalize ranked labels, keeping only the first (highest-scored)
    occurrence of each normalized form."""
    out: list[str] = []
    seen: set[str] = set()
    for label in ranked:
        n = normalize_label(label)
        if n and n not in seen:
            seen.add(n)
            out.append(n)
    return out


def _config_value(value: object) -> object:
    if isinstance(value, frozenset):
        return sorted(value)
    if callable(value):
        return repr(value)
    return value


def config_to_dict(cfg: object) -> dict:
    import dataclasses

    return {
        f.name: _config_value(getattr(cfg, f.name)) for f in dataclasses.fields(cfg)
    }


def run_evaluation(
    *,
    tables: Mapping[str, Table],
    split: EvaluationSplit,
    index: TableIndex,
    cand_cfg: RowCandidateConfig | ColumnCandidateConfig,
    rank_cfg: RowRankingConfig | ColumnRankingConfig,
    kb: KbStore | None = None,
    depth: int = DEFAULT_DEPTH,
    seed_sizes: Sequence[int] | None = None,
    subset: str = "test",
) -> dict:
    """Simulate, select, rank, and score every table of the chosen subset.

    The index must have been built with the split excluded; anything else
    would leak evaluation tables into the statistics and is rejected.
    """
    task = split.task
    leaked = sorted(set(split.excluded()) - set(index.excluded))
    if leaked:
        raise ValueError(f"split tables not excluded from index: {leaked[:5]}")
    if subset not in ("test", "validation"):
        raise ValueError(f"unknown subset {subset!r}")
    if task == "rows" and kb is None:
        raise ValueError("row evaluation requires a KB store")
    sizes = tuple(seed_sizes) if seed_sizes is not None else (
        ROW_SEED_SIZES if task == "rows" else COLUMN_SEED_SIZES
    )
    table_ids = split.test if subset == "test" else split.validation

    per_size: dict[str, dict] = {}
    for size in sizes:
        table_rows: list[dict] = []
        aps: list[float] = []
        rrs: list[float] = []
        recalls: list[float] = []
        cand_counts: list[int] = []
        skipped = 0
        for tid in table_ids:
            table = tables[tid]
            try:
                case = simulate_case(table, task, size)
            except ValueError as exc:
                skipped += 1
                table_rows.append({"table_id": tid, "skipped": str(exc)})
                continue
            if not case.ground_truth:
                skipped += 1
                table_rows.append({"table_id": tid, "skipped": "empty ground truth"})
                continue
            if task == "rows":
                candidates = set(
                    select_row_candidates(case.seed, cand_cfg, index=index, kb=kb)
                )
                suggestions = rank_rows(case.seed, cand_cfg, rank_cfg, index=index, kb=kb)
                ranked = [s.key for s in suggestions][:depth]
            else:
                labels, _ = select_column_candidates(case.seed, cand_cfg, index=index)
                candidates = set(labels)
                suggestions = rank_columns(case.seed, cand_cfg, rank_cfg, index=index)
                ranked = dedupe_normalized_labels([s.key for s in suggestions])[:depth]
            truth = case.ground_truth
            recall = len(candidates & truth) / len(truth)
            ap = average_precision(ranked, truth)
            rr = reciprocal_rank(ranked, truth)
            aps.append(ap)
            rrs.append(rr)
            recalls.append(recall)
            cand_counts.append(len(candidates))
            table_rows.append(
                {
                    "table_id": tid,
                    "ap": ap,
                    "rr": rr,
                    "recall": recall,
                    "n_candidates": len(candidates),
                }
            )
        evaluated = len(aps)
        per_size[str(size)] = {
            "map": math.fsum(aps) / evaluated if evaluated else None,
            "mrr": math.fsum(rrs) / evaluated if evaluated else None,
            "mean_recall": math.fsum(recalls) / evaluated if evaluated else None,
            "mean_candidates": math.fsum(cand_counts) / evaluated if evaluated else None,
            "evaluated": evaluated,
            "skipped": skipped,
            "tables": table_rows,
        }

    return {
        "format_version": REPORT_FORMAT_VERSION,
        "task": task,
        "subset": subset,
        "depth": depth,
        "split": {
            "task": split.task,
            "rng_seed": split.rng_seed,
            "n_validation": len(split.validation),
            "n_test": len(split.test),
        },
        "config": {
            "candidates": config_to_dict(cand_cfg),
            "ranking": config_to_dict(rank_cfg),
        },
        "seed_sizes": per_size,
    }


def report_to_json(report: Mapping) -> str:
    """Canonical report rendering: sorted keys, two-space indent, newline."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def paired_ttest(report_a: Mapping, report_b: Mapping, seed_size: int | str) -> dict:
    """Two-tailed paired t-test over per-table AP pairs of two reports.

    Tables are matched by id; tables missing or skipped in either report
    are dropped.  Returns the statistic, p-value, and pair count.
    """
    from scipy import stats as scipy_stats

    key = str(seed_size)

    def ap_by_table(report: Mapping) -> dict[str, float]:
        return {
            row["table_id"]: row["ap"]
            for row in report["seed_sizes"][key]["tables"]
            if "ap" in row
        }

    a = ap_by_table(report_a)
    b = ap_by_table(report_b)
    common = sorted(set(a) & set(b))
    if len(common) < 2:
        return {"t": None, "p": None, "n": len(common)}
    result = scipy_stats.ttest_rel([a[t] for t in common], [b[t] for t in common])
    return {"t": float(result.statistic), "p": float(result.pvalue), "n": len(common)}
