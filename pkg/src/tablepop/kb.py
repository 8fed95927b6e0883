"""Knowledge-base store: entity categories, types, relations, links, abstracts.

The dump is newline-delimited JSON, one entity per line::

    {"id": str, "categories": [str], "types": [str],
     "triples": [[s, p, o]], "outlinks": [str], "abstract": str}

Relations are pairs obtained from a triple by deleting the entity's own
position, so ``(Japan, capital, Tokyo)`` contributes ``(capital, Tokyo)`` to
Japan and ``(Japan, capital)`` to Tokyo.  Triples that would leave the
entity mentioned in the remaining pair (self-loops) are dropped.

Entities without an abstract are retained but flagged: they still take part
in similarity computations, but are excluded from the background abstract
language model and, by default, from the row-candidate pool.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
import json

from .tables import RecordError, tokenize

logger = logging.getLogger(__name__)

PROPERTY_FIELDS = ("categories", "types")


class KbLoadError(ValueError):
    """Fatal problem with the KB dump (e.g. duplicate entity id)."""


@dataclass(frozen=True, slots=True)
class EntityRecord:
    id: str
    categories: frozenset[str]
    types: frozenset[str]
    relations: frozenset[tuple[str, str]]
    outlinks: frozenset[str]
    abstract_terms: tuple[str, ...]
    abstract_tf: Mapping[str, int]
    has_abstract: bool

    @property
    def abstract_len(self) -> int:
        return len(self.abstract_terms)


class KbStore:
    """Immutable entity store with eager category/type inverted indexes."""

    def __init__(self, records: Mapping[str, EntityRecord]):
        self.records: dict[str, EntityRecord] = dict(records)
        self.category_index: dict[str, set[str]] = {}
        self.type_index: dict[str, set[str]] = {}
        for rec in self.records.values():
            for cat in rec.categories:
                self.category_index.setdefault(cat, set()).add(rec.id)
            for typ in rec.types:
                self.type_index.setdefault(typ, set()).add(rec.id)
        counts: Counter[str] = Counter()
        lengths: list[int] = []
        for rec in self.records.values():
            if rec.has_abstract:
                counts.update(rec.abstract_tf)
                lengths.append(rec.abstract_len)
        total = sum(counts.values())
        self.background_abstract_lm: dict[str, float] = (
            {t: n / total for t, n in counts.items()} if total else {}
        )
        self.mean_abstract_length: float = (
            sum(lengths) / len(lengths) if lengths else 0.0
        )

    @property
    def total_entities(self) -> int:
        return len(self.records)

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self.records

    def __getitem__(self, entity_id: str) -> EntityRecord:
        return self.records[entity_id]

    def get(self, entity_id: str) -> EntityRecord | None:
        return self.records.get(entity_id)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[str]:
        return iter(self.records)

    def background_abstract_prob(self, term: str) -> float:
        return self.background_abstract_lm.get(term, 0.0)

    def _property_index(self, prop: str) -> dict[str, set[str]]:
        if prop == "categories":
            return self.category_index
        if prop == "types":
            return self.type_index
        raise ValueError(f"unknown property field {prop!r}")

    def property_overlap_score(self, entity_id: str, seeds: Sequence[str], prop: str) -> int:
        """Size of the intersection of the entity's property set with the
        union of the seeds' property sets.  Unknown ids raise KeyError."""
        rec = self.records[entity_id]
        union: set[str] = set()
        for s in seeds:
            union |= getattr(self.records[s], prop)
        return len(getattr(rec, prop) & union)

    def top_candidates_by_overlap(
        self,
        seeds: Sequence[str],
        prop: str,
        k: int,
        *,
        exclude: frozenset[str] | set[str] = frozenset(),
        require_abstract: bool = False,
    ) -> list[str]:
        """Top-k entity ids by property overlap with the seed union.

        Only entities sharing at least one property are considered; ties
        break by ascending id.
        """
        index = self._property_index(prop)
        union: set[str] = set()
        for s in seeds:
            union |= getattr(self.records[s], prop)
        scores: Counter[str] = Counter()
        for value in union:
            for eid in index.get(value, ()):
                scores[eid] += 1
        ranked = sorted(
            (
                (eid, n)
                for eid, n in scores.items()
                if eid not in exclude
                and (not require_abstract or self.records[eid].has_abstract)
            ),
            key=lambda item: (-item[1], item[0]),
        )
        return [eid for eid, _ in ranked[:k]]


def load_redirects(
    stream: Iterable[bytes | str],
    *,
    on_error: Callable[[RecordError], None] | None = None,
) -> dict[str, str]:
    """Read a redirects file of tab-separated ``from<TAB>to`` lines."""
    redirects: dict[str, str] = {}
    for lineno, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        line = line.rstrip("\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            err = RecordError(lineno, f"malformed redirect line: {line!r}")
            if on_error is not None:
                on_error(err)
            else:
                logger.warning("redirects line %d: %s", err.line, err.message)
            continue
        redirects[parts[0]] = parts[1]
    return redirects


def _parse_kb_record(obj: object) -> dict:
    if not isinstance(obj, dict):
        raise ValueError("record is not a JSON object")
    entity_id = obj.get("id")
    if not isinstance(entity_id, str) or not entity_id:
        raise ValueError("field 'id' must be a non-empty string")
    out = {"id": entity_id}
    for field in ("categories", "types", "outlinks"):
        values = obj.get(field, [])
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise ValueError(f"field {field!r} must be a list of strings")
        out[field] = values
    triples = obj.get("triples", [])
    if not isinstance(triples, list):
        raise ValueError("field 'triples' must be a list")
    for t in triples:
        if (
            not isinstance(t, list)
            or len(t) != 3
            or not all(isinstance(x, str) for x in t)
        ):
            raise ValueError(f"malformed triple {t!r}")
    out["triples"] = [tuple(t) for t in triples]
    abstract = obj.get("abstract", "")
    if not isinstance(abstract, str):
        raise ValueError("field 'abstract' must be a string")
    out["abstract"] = abstract
    return out


def load_kb(
    stream: Iterable[bytes | str],
    *,
    on_error: Callable[[RecordError], None] | None = None,
) -> KbStore:
    """Load a KB dump into an immutable store.

    Malformed records are reported and skipped; a duplicate entity id is a
    :class:`KbLoadError`.  Every triple contributes a relation pair to each
    of its endpoints that is a loaded entity.
    """
    report = on_error if on_error is not None else _log_record_error
    raw: dict[str, dict] = {}
    for lineno, line in enumerate(stream, start=1):
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
            rec = _parse_kb_record(obj)
        except ValueError as exc:
            report(RecordError(lineno, str(exc)))
            continue
        if rec["id"] in raw:
            raise KbLoadError(f"duplicate entity id {rec['id']!r} at line {lineno}")
        raw[rec["id"]] = rec

    relations: dict[str, set[tuple[str, str]]] = {eid: set() for eid in raw}
    for rec in raw.values():
        for s, p, o in rec["triples"]:
            if s == o:
                continue
            if s in relations and s not in (p, o):
                relations[s].add((p, o))
            if o in relations and o not in (s, p):
                relations[o].add((s, p))

    records: dict[str, EntityRecord] = {}
    for eid, rec in raw.items():
        terms = tuple(tokenize(rec["abstract"]))
        records[eid] = EntityRecord(
            id=eid,
            categories=frozenset(rec["categories"]),
            types=frozenset(rec["types"]),
            relations=frozenset(relations[eid]),
            outlinks=frozenset(rec["outlinks"]),
            abstract_terms=terms,
            abstract_tf=dict(Counter(terms)),
            has_abstract=bool(rec["abstract"].strip()),
        )
    return KbStore(records)


def _log_record_error(err: RecordError) -> None:
    logger.warning("kb line %d: %s", err.line, err.message)
