#!/usr/bin/env python3
"""Freeze the golden evaluation artifacts for the end-to-end regression test.

Builds the golden splits (rng seed 3, 4 validation + 4 test tables per
task), writes them next to the fixture corpus, and freezes the reports of
three runs: row population with the full model, column population with the
full model, and column population with the attribute-correlation baseline.

The fixture composition is asserted below: each test set mixes both content
clusters and contains one "loner" table whose ground truth is unreachable,
so reports exercise the whole AP range.  The acceptance suite re-derives
the MAP/MRR numbers through the brute-force oracle pipeline before trusting
these bytes.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tablepop.columns import ColumnCandidateConfig, ColumnRankingConfig  # noqa: E402
from tablepop.evaluation import make_split, report_to_json, run_evaluation  # noqa: E402
from tablepop.index import build_index  # noqa: E402
from tablepop.kb import load_kb  # noqa: E402
from tablepop.rows import RowCandidateConfig, RowRankingConfig  # noqa: E402
from tablepop.tables import parse_corpus  # noqa: E402

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "tests" / "data" / "golden"
SPLIT_SEED = 3
SPLIT_SIZE = 4


def main() -> None:
    with open(GOLDEN_DIR / "corpus.ndjson", "rb") as fh:
        tables = list(parse_corpus(fh))
    by_id = {t.id: t for t in tables}
    with open(GOLDEN_DIR / "kb.ndjson", "rb") as fh:
        kb = load_kb(fh)

    split_rows = make_split(tables, "rows", SPLIT_SEED, size=SPLIT_SIZE)
    split_cols = make_split(tables, "columns", SPLIT_SEED, size=SPLIT_SIZE)
    # Both clusters and a loner must appear in each test set.
    assert "g11" in split_rows.test and "g10" in split_cols.test
    assert any(t in split_rows.test for t in [f"g{i:02d}" for i in range(5)])
    assert any(t in split_rows.test for t in [f"g{i:02d}" for i in range(5, 10)])

    for split, name in ((split_rows, "split_rows.json"), (split_cols, "split_columns.json")):
        (GOLDEN_DIR / name).write_text(
            json.dumps(split.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        exclude_name = name.replace("split", "exclude").replace(".json", ".txt")
        (GOLDEN_DIR / exclude_name).write_text(
            "\n".join(sorted(split.excluded())) + "\n", encoding="utf-8"
        )

    index_rows = build_index(tables, kb, exclude=split_rows.excluded())
    index_cols = build_index(tables, kb, exclude=split_cols.excluded())

    report_rows = run_evaluation(
        tables=by_id,
        split=split_rows,
        index=index_rows,
        cand_cfg=RowCandidateConfig(),
        rank_cfg=RowRankingConfig(),
        kb=kb,
    )
    report_cols = run_evaluation(
        tables=by_id,
        split=split_cols,
        index=index_cols,
        cand_cfg=ColumnCandidateConfig(),
        rank_cfg=ColumnRankingConfig(),
    )
    report_acsdb = run_evaluation(
        tables=by_id,
        split=split_cols,
        index=index_cols,
        cand_cfg=ColumnCandidateConfig(),
        rank_cfg=ColumnRankingConfig(baseline="acsdb"),
    )

    for report, name in (
        (report_rows, "report_rows.json"),
        (report_cols, "report_columns.json"),
        (report_acsdb, "report_columns_acsdb.json"),
    ):
        (GOLDEN_DIR / name).write_text(report_to_json(report), encoding="utf-8")
        for size, block in report["seed_sizes"].items():
            print(f"{name} seed_size={size}: MAP={block['map']:.6f} MRR={block['mrr']:.6f}")

    # Sanity: the loner pins AP=0 and at least one table reaches AP=1.
    aps = [
        row["ap"]
        for report in (report_rows, report_cols)
        for block in report["seed_sizes"].values()
        for row in block["tables"]
        if "ap" in row
    ]
    assert 0.0 in aps and 1.0 in aps
    print(f"golden artifacts written under {GOLDEN_DIR}")


if __name__ == "__main__":
    main()
