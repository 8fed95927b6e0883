#!/usr/bin/env python3
"""Compare two evaluation reports with a two-tailed paired t-test.

Usage: python scripts/compare_reports.py report_a.json report_b.json

Prints per-seed-size MAP/MRR deltas and the p-value over paired per-table
average-precision scores.  p-values are informational; nothing is asserted.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tablepop.evaluation import paired_ttest  # noqa: E402


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__)
        return 2
    report_a = json.loads(Path(sys.argv[1]).read_text(encoding="utf-8"))
    report_b = json.loads(Path(sys.argv[2]).read_text(encoding="utf-8"))
    sizes = sorted(set(report_a["seed_sizes"]) & set(report_b["seed_sizes"]), key=int)
    for size in sizes:
        a = report_a["seed_sizes"][size]
        b = report_b["seed_sizes"][size]
        test = paired_ttest(report_a, report_b, size)
        print(
            f"seed_size={size}: MAP {a['map']:.4f} vs {b['map']:.4f} "
            f"(delta {a['map'] - b['map']:+.4f}), "
            f"MRR {a['mrr']:.4f} vs {b['mrr']:.4f}, "
            f"t={test['t']}, p={test['p']}, n={test['n']}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
