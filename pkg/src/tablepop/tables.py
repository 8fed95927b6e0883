"""Table data model, corpus ingestion, and column-label normalization.

A corpus is a UTF-8 stream of newline-delimited JSON records, one table per
line::

    {"id": str, "caption": str, "headings": [str],
     "rows": [[{"text": str, "entity": str|null}]]}

Entity identifiers are opaque strings and are canonicalized at ingestion:
redirects are resolved and, when a set of known entities is supplied, links
that do not resolve are demoted to plain text.  Everything downstream
therefore only ever sees canonical ids.

Other dump schemas are supported by writing an importer with the same shape
as :func:`parse_corpus` (``stream -> Iterator[Table]``) and feeding its
output to the index builder.
"""

from __future__ import annotations

import json
import logging
import re
from collections.abc import Callable, Container, Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import IO

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_TRAILING_PUNCTUATION = ":.,;"
_REDIRECT_HOP_LIMIT = 16


class CorpusFormatError(ValueError):
    """The corpus stream itself is unusable (not per-record damage)."""


@dataclass(frozen=True, slots=True)
class RecordError:
    """A malformed record, reported with its 1-based line number."""

    line: int
    message: str


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumerics; no stemming, no stopwords."""
    return _TOKEN_RE.findall(text.lower())


def normalize_label(raw: str) -> str:
    """Canonicalize a column heading label.

    Lowercases, trims, collapses internal whitespace, strips trailing
    punctuation (``: . , ;``) and removes a trailing plural ``s`` from the
    final token when that token is longer than three characters.  Tokens
    ending in ``ss`` keep their ``s`` so the mapping is idempotent.
    """
    s = " ".join(raw.lower().split())
    s = s.rstrip(_TRAILING_PUNCTUATION).rstrip()
    if not s:
        return s
    head, _, last = s.rpartition(" ")
    if len(last) > 3 and last.endswith("s") and not last.endswith("ss"):
        last = last[:-1]
    return f"{head} {last}" if head else last


@dataclass(frozen=True, slots=True)
class Cell:
    text: str
    entity: str | None = None


@dataclass(frozen=True, slots=True)
class Table:
    """A corpus table: caption, ordered heading labels, grid of cells.

    The grid invariant (every row has exactly one cell per heading) is
    enforced at construction; ragged input must be rejected upstream.
    """

    id: str
    caption: str
    headings: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "headings", tuple(self.headings))
        object.__setattr__(self, "rows", tuple(tuple(row) for row in self.rows))
        for i, row in enumerate(self.rows):
            if len(row) != len(self.headings):
                raise ValueError(
                    f"table {self.id!r}: row {i} has {len(row)} cells, "
                    f"expected {len(self.headings)}"
                )

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.headings)

    def leftmost_cells(self) -> tuple[Cell, ...]:
        return tuple(row[0] for row in self.rows)

    def leftmost_entities(self) -> tuple[str, ...]:
        """Entities of the leftmost column in row order, skipping text cells."""
        return tuple(c.entity for c in self.leftmost_cells() if c.entity is not None)

    def entity_set(self) -> frozenset[str]:
        return frozenset(self.leftmost_entities())

    def normalized_labels(self) -> frozenset[str]:
        return frozenset(n for h in self.headings if (n := normalize_label(h)))


@dataclass(frozen=True, slots=True)
class SeedTable:
    """The user's in-progress table: caption, seed entities, seed labels."""

    caption: str = ""
    entities: tuple[str, ...] = ()
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.entities)) != len(self.entities):
            raise ValueError("seed entities must be unique")

    def normalized_labels(self) -> frozenset[str]:
        return frozenset(n for l in self.labels if (n := normalize_label(l)))

    @classmethod
    def from_dict(cls, obj: Mapping) -> SeedTable:
        return cls(
            caption=str(obj.get("caption", "")),
            entities=tuple(str(e) for e in obj.get("entities", [])),
            labels=tuple(str(l) for l in obj.get("labels", [])),
        )

    def to_dict(self) -> dict:
        return {
            "caption": self.caption,
            "entities": list(self.entities),
            "labels": list(self.labels),
        }


def classify_entity_focused(table: Table, min_rows: int = 6, min_extra_cols: int = 3) -> bool:
    """True iff the leftmost column holds only distinct entities and the
    table has at least ``min_rows`` rows and ``min_extra_cols`` columns
    beyond the entity column."""
    if table.n_rows < min_rows or table.n_cols < min_extra_cols + 1:
        return False
    entities = [cell.entity for cell in table.leftmost_cells()]
    if any(e is None for e in entities):
        return False
    return len(set(entities)) == len(entities)


def leftmost_entity_fraction(table: Table) -> float:
    cells = table.leftmost_cells()
    if not cells:
        return 0.0
    return sum(1 for c in cells if c.entity is not None) / len(cells)


_LADDER_STEPS = ("existing", "ge60", "ge80", "full", "full_unique")


def corpus_filter_ladder(
    tables: Iterable[Table], min_rows: int = 6, min_extra_cols: int = 3
) -> dict[str, dict[str, int]]:
    """Count tables passing each leftmost-entity threshold.

    Steps: at least one entity cell ("existing"), >=60% / >=80% / 100%
    entity cells, and 100% with all entities unique.  Counts are reported
    both over all tables and restricted to tables meeting the row/column
    size constraints.  The step counts are monotone non-increasing.
    """
    total = dict.fromkeys(_LADDER_STEPS, 0)
    constrained = dict.fromkeys(_LADDER_STEPS, 0)
    for t in tables:
        frac = leftmost_entity_fraction(t)
        entities = t.leftmost_entities()
        unique = len(set(entities)) == len(entities)
        size_ok = t.n_rows >= min_rows and t.n_cols >= min_extra_cols + 1
        passes = {
            "existing": frac > 0.0,
            "ge60": frac >= 0.6,
            "ge80": frac >= 0.8,
            "full": frac == 1.0 and t.n_rows > 0,
            "full_unique": frac == 1.0 and t.n_rows > 0 and unique,
        }
        for step, ok in passes.items():
            if ok:
                total[step] += 1
                if size_ok:
                    constrained[step] += 1
    return {"total": total, "with_constraints": constrained}


def resolve_redirect(entity: str, redirects: Mapping[str, str]) -> str:
    """Follow a redirect chain to its target; cycles stop at the hop limit."""
    seen = {entity}
    for _ in range(_REDIRECT_HOP_LIMIT):
        target = redirects.get(entity)
        if target is None or target in seen:
            return entity
        seen.add(target)
        entity = target
    return entity


def record_to_table(
    obj: object,
    *,
    redirects: Mapping[str, str] | None = None,
    known_entities: Container[str] | None = None,
) -> Table:
    """Build a Table from one decoded corpus record; ValueError on schema violations."""
    if not isinstance(obj, dict):
        raise ValueError("record is not a JSON object")
    for field in ("id", "caption", "headings", "rows"):
        if field not in obj:
            raise ValueError(f"missing field {field!r}")
    table_id, caption = obj["id"], obj["caption"]
    if not isinstance(table_id, str) or not table_id:
        raise ValueError("field 'id' must be a non-empty string")
    if not isinstance(caption, str):
        raise ValueError("field 'caption' must be a string")
    headings = obj["headings"]
    if not isinstance(headings, list) or not all(isinstance(h, str) for h in headings):
        raise ValueError("field 'headings' must be a list of strings")
    raw_rows = obj["rows"]
    if not isinstance(raw_rows, list):
        raise ValueError("field 'rows' must be a list")
    rows: list[tuple[Cell, ...]] = []
    for i, raw_row in enumerate(raw_rows):
        if not isinstance(raw_row, list):
            raise ValueError(f"row {i} is not a list")
        if len(raw_row) != len(headings):
            raise ValueError(
                f"row {i} has {len(raw_row)} cells, expected {len(headings)}"
            )
        cells: list[Cell] = []
        for j, raw_cell in enumerate(raw_row):
            if not isinstance(raw_cell, dict) or "text" not in raw_cell:
                raise ValueError(f"cell ({i},{j}) must be an object with 'text'")
            text = raw_cell["text"]
            entity = raw_cell.get("entity")
            if not isinstance(text, str) or not (entity is None or isinstance(entity, str)):
                raise ValueError(f"cell ({i},{j}) has invalid field types")
            if entity is not None and redirects:
                entity = resolve_redirect(entity, redirects)
            if entity is not None and known_entities is not None and entity not in known_entities:
                entity = None
            cells.append(Cell(text=text, entity=entity))
        rows.append(tuple(cells))
    return Table(id=table_id, caption=caption, headings=tuple(headings), rows=tuple(rows))


def table_to_record(table: Table) -> dict:
    return {
        "id": table.id,
        "caption": table.caption,
        "headings": list(table.headings),
        "rows": [
            [{"text": c.text, "entity": c.entity} for c in row] for row in table.rows
        ],
    }


def write_corpus(tables: Iterable[Table], fh: IO[str]) -> None:
    for table in tables:
        fh.write(json.dumps(table_to_record(table), ensure_ascii=False) + "\n")


def parse_corpus(
    stream: Iterable[bytes | str],
    *,
    redirects: Mapping[str, str] | None = None,
    known_entities: Container[str] | None = None,
    on_error: Callable[[RecordError], None] | None = None,
) -> Iterator[Table]:
    """Parse newline-delimited table records, in input order.

    Malformed records (bad JSON, schema violations, ragged rows, duplicate
    ids) are reported through ``on_error`` (default: logged) and skipped;
    the rest of the stream is still parsed.  An unreadable stream raises
    :class:`CorpusFormatError`.
    """
    report = on_error if on_error is not None else _log_record_error
    seen_ids: set[str] = set()
    lines = iter(stream)
    lineno = 0
    while True:
        try:
            line = next(lines)
        except StopIteration:
            return
        except OSError as exc:
            raise CorpusFormatError(f"corpus stream unreadable at line {lineno + 1}: {exc}") from exc
        lineno += 1
        if isinstance(line, bytes):
            try:
                line = line.decode("utf-8")
            except UnicodeDecodeError as exc:
                report(RecordError(lineno, f"invalid UTF-8: {exc}"))
                continue
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            report(RecordError(lineno, f"invalid JSON: {exc.msg}"))
            continue
        try:
            table = record_to_table(obj, redirects=redirects, known_entities=known_entities)
        except ValueError as exc:
            report(RecordError(lineno, str(exc)))
            continue
        if table.id in seen_ids:
            report(RecordError(lineno, f"duplicate table id {table.id!r}"))
            continue
        seen_ids.add(table.id)
        yield table


def _log_record_error(err: RecordError) -> None:
    logger.warning("corpus line %d: %s", err.line, err.message)
