"""Okapi BM25 over token-sequence documents with a stable total order.

The idf is the Lucene-style ``ln(1 + (N - df + 0.5) / (df + 0.5))``, which
is strictly positive for any matching term; downstream relevance factors
rely on scores being non-negative.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence


class Bm25Index:
    def __init__(self, docs: Mapping[str, Sequence[str]], k1: float = 1.2, b: float = 0.75):
        if k1 < 0 or not 0 <= b <= 1:
            raise ValueError(f"invalid BM25 parameters k1={k1}, b={b}")
        self.k1 = k1
        self.b = b
        self.n_docs = len(docs)
        self.doc_len: dict[str, int] = {}
        self.postings: dict[str, dict[str, int]] = {}
        total_len = 0
        for doc_id, tokens in docs.items():
            self.doc_len[doc_id] = len(tokens)
            total_len += len(tokens)
            for t in tokens:
                self.postings.setdefault(t, {})
                self.postings[t][doc_id] = self.postings[t].get(doc_id, 0) + 1
        self.avgdl = total_len / self.n_docs if self.n_docs else 0.0

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        if df == 0:
            return 0.0
        return math.log(1.0 + (self.n_docs - df + 0.5) / (df + 0.5))

    def scores(self, query: Sequence[str]) -> dict[str, float]:
        """BM25 score for every document matching at least one query token.

        Repeated query tokens contribute once per occurrence.
        """
        scores: dict[str, float] = {}
        for term in query:
            postings = self.postings.get(term)
            if not postings:
                continue
            idf = self.idf(term)
            for doc_id, tf in postings.items():
                dl = self.doc_len[doc_id]
                norm = self.k1 * (1.0 - self.b + self.b * (dl / self.avgdl if self.avgdl else 0.0))
                contrib = idf * (tf * (self.k1 + 1.0)) / (tf + norm)
                scores[doc_id] = scores.get(doc_id, 0.0) + contrib
        return scores

    def search(self, query: Sequence[str], k: int | None = None) -> list[tuple[str, float]]:
        """Top-k matching documents ordered by descending score, then id."""
        ranked = sorted(self.scores(query).items(), key=lambda item: (-item[1], item[0]))
        return ranked if k is None else ranked[:k]
