"""Inverted indexes and corpus statistics consumed by the ranking formulas.

Statistics cover: which tables contain an entity in their leftmost column,
which tables contain a (normalized) heading label, per-entity term
frequencies over heading labels, per-entity caption-term table counts, and
the background language model over heading-label terms.

Tables on an exclusion list (validation/test splits) contribute neither
statistics nor search postings, but their content is still stored so an
evaluation run can recover ground truth from the same snapshot.

On disk an index is a directory of versioned binary files plus a
``manifest.json`` recording the corpus/KB/exclusion hashes and BM25
parameters.
"""

from __future__ import annotations

import hashlib
import json
import pickle
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

from .bm25 import Bm25Index
from .kb import KbStore
from .tables import Table, normalize_label, tokenize

FORMAT_VERSION = 1
SEARCH_FIELDS = ("caption", "entities", "labels")

_BINARY_FILES = {
    "tables": "tables.bin",
    "stats": "statistics.bin",
    "caption_search": "search_caption.bin",
    "entity_search": "search_entities.bin",
    "label_search": "search_labels.bin",
}


@dataclass(frozen=True, slots=True)
class SearchHit:
    table_id: str
    score: float


@dataclass
class CorpusStatistics:
    n_tables: int
    tables_with_entity: dict[str, frozenset[str]]
    tables_with_label: dict[str, frozenset[str]]
    heading_term_tf: dict[str, dict[str, int]]
    entity_label_length: dict[str, int]
    caption_term_tables: dict[str, dict[str, int]]
    background_label_lm: dict[str, float]
    mean_entity_label_length: float


class TableIndex:
    """Immutable snapshot: statistics, three BM25 fields, stored tables."""

    def __init__(
        self,
        *,
        stats: CorpusStatistics,
        caption_search: Bm25Index,
        entity_search: Bm25Index,
        label_search: Bm25Index,
        tables: dict[str, Table],
        excluded: frozenset[str],
        manifest: dict | None = None,
    ):
        self.stats = stats
        self._searchers = {
            "caption": caption_search,
            "entities": entity_search,
            "labels": label_search,
        }
        self.tables = tables
        self.excluded = excluded
        self.manifest = manifest if manifest is not None else {}

    @property
    def n_tables(self) -> int:
        return self.stats.n_tables

    @property
    def k1(self) -> float:
        return self._searchers["caption"].k1

    @property
    def b(self) -> float:
        return self._searchers["caption"].b

    @property
    def version(self) -> str:
        return manifest_version(self.manifest)

    def searcher(self, fld: str) -> Bm25Index:
        try:
            return self._searchers[fld]
        except KeyError:
            raise ValueError(f"unknown search field {fld!r}") from None

    def search(self, fld: str, query: Sequence[str], k: int | None = None) -> list[SearchHit]:
        """Top-k tables by BM25 against one field; empty query yields no hits.

        For the ``labels`` field, query strings are normalized first.
        """
        if fld == "labels":
            query = [n for q in query if (n := normalize_label(q))]
        return [SearchHit(tid, s) for tid, s in self.searcher(fld).search(query, k)]

    def n_tables_with_entity(self, entity: str) -> int:
        return len(self.stats.tables_with_entity.get(entity, ()))

    def n_tables_with_label(self, label: str) -> int:
        return len(self.stats.tables_with_label.get(label, ()))

    def count_tables_with_all(self, entities: Iterable[str]) -> int:
        """Number of tables containing every given entity; the empty set
        counts all indexed tables."""
        entities = set(entities)
        if not entities:
            return self.n_tables
        postings = [self.stats.tables_with_entity.get(e, frozenset()) for e in entities]
        return len(frozenset.intersection(*postings)) if all(postings) else 0

    def count_tables_with_entity_and_label(self, entity: str, label: str) -> int:
        e_tables = self.stats.tables_with_entity.get(entity, frozenset())
        l_tables = self.stats.tables_with_label.get(label, frozenset())
        return len(e_tables & l_tables)

    def label_pair_count(self, l1: str, l2: str) -> int:
        t1 = self.stats.tables_with_label.get(l1, frozenset())
        t2 = self.stats.tables_with_label.get(l2, frozenset())
        return len(t1 & t2)

    def background_label_prob(self, term: str) -> float:
        return self.stats.background_label_lm.get(term, 0.0)


def build_index(
    tables: Iterable[Table],
    kb: KbStore | None = None,
    *,
    exclude: Iterable[str] = (),
    k1: float = 1.2,
    b: float = 0.75,
) -> TableIndex:
    """Build statistics and search indexes over all non-excluded tables.

    When a KB is given, only entity cells resolving in it contribute to
    entity statistics and postings.
    """
    excluded = frozenset(exclude)
    stored: dict[str, Table] = {}
    for t in tables:
        if t.id in stored:
            raise ValueError(f"duplicate table id {t.id!r}")
        stored[t.id] = t
    indexed = [t for t in stored.values() if t.id not in excluded]

    tables_with_entity: dict[str, set[str]] = {}
    tables_with_label: dict[str, set[str]] = {}
    heading_term_tf: dict[str, Counter[str]] = {}
    caption_term_tables: dict[str, Counter[str]] = {}
    background_counts: Counter[str] = Counter()
    caption_docs: dict[str, list[str]] = {}
    entity_docs: dict[str, list[str]] = {}
    label_docs: dict[str, list[str]] = {}

    for t in indexed:
        entities = [e for e in t.leftmost_entities() if kb is None or e in kb]
        entity_set = set(entities)
        heading_tokens: list[str] = []
        for h in t.headings:
            heading_tokens.extend(tokenize(h))
        caption_tokens = tokenize(t.caption)
        norm_labels = [n for h in t.headings if (n := normalize_label(h))]

        caption_docs[t.id] = caption_tokens
        entity_docs[t.id] = entities
        label_docs[t.id] = norm_labels
        background_counts.update(heading_tokens)

        for label in set(norm_labels):
            tables_with_label.setdefault(label, set()).add(t.id)
        for e in entity_set:
            tables_with_entity.setdefault(e, set()).add(t.id)
            heading_term_tf.setdefault(e, Counter()).update(heading_tokens)
            caption_term_tables.setdefault(e, Counter()).update(set(caption_tokens))

    total_heading_terms = sum(background_counts.values())
    background_label_lm = (
        {t_: n / total_heading_terms for t_, n in background_counts.items()}
        if total_heading_terms
        else {}
    )
    label_lengths = {e: sum(tf.values()) for e, tf in heading_term_tf.items()}
    mean_label_length = (
        sum(label_lengths.values()) / len(label_lengths) if label_lengths else 0.0
    )

    stats = CorpusStatistics(
        n_tables=len(indexed),
        tables_with_entity={e: frozenset(s) for e, s in tables_with_entity.items()},
        tables_with_label={l: frozenset(s) for l, s in tables_with_label.items()},
        heading_term_tf={e: dict(tf) for e, tf in heading_term_tf.items()},
        entity_label_length=label_lengths,
        caption_term_tables={e: dict(c) for e, c in caption_term_tables.items()},
        background_label_lm=background_label_lm,
        mean_entity_label_length=mean_label_length,
    )
    manifest = {
        "format_version": FORMAT_VERSION,
        "bm25": {"k1": k1, "b": b},
        "n_tables": len(indexed),
        "n_stored_tables": len(stored),
        "n_excluded": len(excluded),
        "corpus_sha256": None,
        "kb_sha256": None,
        "exclude_sha256": None,
    }
    return TableIndex(
        stats=stats,
        caption_search=Bm25Index(caption_docs, k1, b),
        entity_search=Bm25Index(entity_docs, k1, b),
        label_search=Bm25Index(label_docs, k1, b),
        tables=stored,
        excluded=excluded,
        manifest=manifest,
    )


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_version(manifest: dict) -> str:
    canonical = json.dumps(manifest, sort_keys=True, ensure_ascii=False).encode("utf-8")
    return hashlib.sha256(canonical).hexdigest()


def _dump_binary(path: Path, payload: object) -> str:
    blob = pickle.dumps({"format_version": FORMAT_VERSION, "payload": payload}, protocol=5)
    path.write_bytes(blob)
    return hashlib.sha256(blob).hexdigest()


def _load_binary(path: Path) -> object:
    obj = pickle.loads(path.read_bytes())
    if obj.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"{path.name}: unsupported format version {obj.get('format_version')}")
    return obj["payload"]


def save_index(
    index: TableIndex,
    out_dir: str | Path,
    *,
    corpus_sha256: str | None = None,
    kb_sha256: str | None = None,
    exclude_sha256: str | None = None,
) -> dict:
    """Persist the index as versioned binary files plus a manifest; returns
    the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    file_hashes = {
        _BINARY_FILES["tables"]: _dump_binary(out / _BINARY_FILES["tables"], index.tables),
        _BINARY_FILES["stats"]: _dump_binary(out / _BINARY_FILES["stats"], index.stats),
        _BINARY_FILES["caption_search"]: _dump_binary(
            out / _BINARY_FILES["caption_search"], index.searcher("caption")
        ),
        _BINARY_FILES["entity_search"]: _dump_binary(
            out / _BINARY_FILES["entity_search"], index.searcher("entities")
        ),
        _BINARY_FILES["label_search"]: _dump_binary(
            out / _BINARY_FILES["label_search"], index.searcher("labels")
        ),
    }
    manifest = dict(index.manifest)
    manifest.update(
        {
            "format_version": FORMAT_VERSION,
            "excluded": sorted(index.excluded),
            "files": file_hashes,
        }
    )
    if corpus_sha256 is not None:
        manifest["corpus_sha256"] = corpus_sha256
    if kb_sha256 is not None:
        manifest["kb_sha256"] = kb_sha256
    if exclude_sha256 is not None:
        manifest["exclude_sha256"] = exclude_sha256
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    index.manifest = manifest
    return manifest


def load_index(in_dir: str | Path) -> TableIndex:
    src = Path(in_dir)
    manifest = json.loads((src / "manifest.json").read_text(encoding="utf-8"))
    if manifest.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported index format version {manifest.get('format_version')}")
    return TableIndex(
        stats=_load_binary(src / _BINARY_FILES["stats"]),
        caption_search=_load_binary(src / _BINARY_FILES["caption_search"]),
        entity_search=_load_binary(src / _BINARY_FILES["entity_search"]),
        label_search=_load_binary(src / _BINARY_FILES["label_search"]),
        tables=_load_binary(src / _BINARY_FILES["tables"]),
        excluded=frozenset(manifest.get("excluded", ())),
        manifest=manifest,
    )
