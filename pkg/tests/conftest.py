from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from tablepop.evaluation import make_split
from tablepop.index import build_index
from tablepop.kb import load_kb
from tablepop.tables import Cell, Table, parse_corpus

settings.register_profile(
    "ci", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ci")

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = DATA_DIR / "golden"
GOLDEN_SPLIT_SEED = 3
GOLDEN_SPLIT_SIZE = 4


def load_fixture_corpus(path):
    errors = []
    with open(path, "rb") as fh:
        tables = list(parse_corpus(fh, on_error=errors.append))
    assert not errors, errors
    return tables


def make_table(tid, caption, headings, lead, extra_rows=None):
    """Build a table whose leftmost column is given explicitly.

    ``lead`` entries are entity ids (linked) or ``(text,)`` tuples for
    plain-text cells; remaining cells are filler text.
    """
    rows = []
    for r, item in enumerate(lead):
        if isinstance(item, tuple):
            first = Cell(text=item[0])
        else:
            first = Cell(text=item, entity=item)
        row = [first]
        row.extend(Cell(text=f"v{r}:{c}") for c in range(1, len(headings)))
        rows.append(tuple(row))
    if extra_rows:
        rows.extend(extra_rows)
    return Table(id=tid, caption=caption, headings=tuple(headings), rows=tuple(rows))


@pytest.fixture(scope="session")
def synthetic_tables():
    return load_fixture_corpus(DATA_DIR / "synthetic" / "corpus.ndjson")


@pytest.fixture(scope="session")
def synthetic_kb():
    with open(DATA_DIR / "synthetic" / "kb.ndjson", "rb") as fh:
        return load_kb(fh)


@pytest.fixture(scope="session")
def synthetic_index(synthetic_tables, synthetic_kb):
    return build_index(synthetic_tables, synthetic_kb)


@pytest.fixture(scope="session")
def golden_tables():
    return load_fixture_corpus(GOLDEN_DIR / "corpus.ndjson")


@pytest.fixture(scope="session")
def golden_tables_by_id(golden_tables):
    return {t.id: t for t in golden_tables}


@pytest.fixture(scope="session")
def golden_kb():
    with open(GOLDEN_DIR / "kb.ndjson", "rb") as fh:
        return load_kb(fh)


@pytest.fixture(scope="session")
def golden_split_rows(golden_tables):
    return make_split(golden_tables, "rows", GOLDEN_SPLIT_SEED, size=GOLDEN_SPLIT_SIZE)


@pytest.fixture(scope="session")
def golden_split_columns(golden_tables):
    return make_split(golden_tables, "columns", GOLDEN_SPLIT_SEED, size=GOLDEN_SPLIT_SIZE)


@pytest.fixture(scope="session")
def golden_index_rows(golden_tables, golden_kb, golden_split_rows):
    return build_index(golden_tables, golden_kb, exclude=golden_split_rows.excluded())


@pytest.fixture(scope="session")
def golden_index_columns(golden_tables, golden_kb, golden_split_columns):
    return build_index(golden_tables, golden_kb, exclude=golden_split_columns.excluded())
