from __future__ import annotations

import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tablepop.kb import KbLoadError, load_kb, load_redirects


def kb_stream(records):
    return io.BytesIO(("\n".join(json.dumps(r) for r in records) + "\n").encode())


def minimal(eid, **kw):
    rec = {"id": eid, "categories": [], "types": [], "triples": [], "outlinks": [], "abstract": ""}
    rec.update(kw)
    return rec


class TestLoadKb:
    def test_three_entities(self):
        kb = load_kb(kb_stream([minimal("a"), minimal("b"), minimal("c")]))
        assert kb.total_entities == 3

    def test_relation_pairs_from_both_positions(self):
        records = [
            minimal("Japan", triples=[["Japan", "capital", "Tokyo"]]),
            minimal("Tokyo"),
        ]
        kb = load_kb(kb_stream(records))
        assert ("capital", "Tokyo") in kb["Japan"].relations
        assert ("Japan", "capital") in kb["Tokyo"].relations

    def test_self_loop_dropped(self):
        kb = load_kb(kb_stream([minimal("a", triples=[["a", "p", "a"]])]))
        assert kb["a"].relations == frozenset()

    def test_duplicate_id_fatal(self):
        with pytest.raises(KbLoadError, match="dup"):
            load_kb(kb_stream([minimal("dup"), minimal("dup")]))

    def test_malformed_record_skipped(self):
        errors = []
        stream = io.BytesIO(b'{"id": "ok"}\n{"categories": []}\n')
        kb = load_kb(stream, on_error=errors.append)
        assert kb.total_entities == 1
        assert errors[0].line == 2

    def test_abstract_flagging(self):
        kb = load_kb(kb_stream([minimal("a", abstract="Some words"), minimal("b")]))
        assert kb["a"].has_abstract
        assert not kb["b"].has_abstract
        assert kb["a"].abstract_terms == ("some", "words")

    def test_background_lm_sums_to_one(self, synthetic_kb):
        assert abs(sum(synthetic_kb.background_abstract_lm.values()) - 1.0) < 1e-9

    def test_triples_reconstructable(self, synthetic_kb):
        pairs = {
            (eid, pair)
            for eid, rec in synthetic_kb.records.items()
            for pair in rec.relations
        }
        # Every stored pair must come from exactly one original triple.
        with open("tests/data/synthetic/kb.ndjson", "rb") as fh:
            originals = set()
            for line in fh:
                rec = json.loads(line)
                for s, p, o in rec["triples"]:
                    if s != o:
                        originals.add((s, p, o))
        reconstructed = set()
        for eid, (x, y) in pairs:
            as_subject = (eid, x, y)
            as_object = (x, y, eid)
            matches = {t for t in (as_subject, as_object) if t in originals}
            assert len(matches) == 1, (eid, x, y, matches)
            reconstructed |= matches
        touched = {
            t
            for t in originals
            if t[0] in synthetic_kb.records or t[2] in synthetic_kb.records
        }
        assert reconstructed == touched


class TestPropertyOverlap:
    @pytest.fixture()
    def kb(self):
        return load_kb(
            kb_stream(
                [
                    minimal("e", categories=["A", "B"]),
                    minimal("e2", categories=["A", "B", "C"]),
                    minimal("s1", categories=["B", "C"]),
                    minimal("s2", categories=["A", "B"]),
                    minimal("s3", categories=["Z"]),
                ]
            )
        )

    def test_simple_intersection(self, kb):
        assert kb.property_overlap_score("e", ["s1"], "categories") == 1

    def test_disjoint(self, kb):
        assert kb.property_overlap_score("e", ["s3"], "categories") == 0

    def test_union_of_seed_properties(self, kb):
        # brute force: {A,B,C} against union({B,C}, {A,B}) = {A,B,C}
        union = kb["s1"].categories | kb["s2"].categories
        expected = len(kb["e2"].categories & union)
        assert kb.property_overlap_score("e2", ["s1", "s2"], "categories") == expected == 3

    def test_unknown_id_errors(self, kb):
        with pytest.raises(KeyError):
            kb.property_overlap_score("missing", ["s1"], "categories")

    def test_bounded_and_monotone(self, synthetic_kb):
        ids = sorted(synthetic_kb.records)[:12]
        entity = ids[0]
        prev = 0
        for upto in range(1, len(ids)):
            score = synthetic_kb.property_overlap_score(entity, ids[1:upto + 1], "categories")
            assert score <= len(synthetic_kb[entity].categories)
            assert score >= prev
            prev = score

    def test_top_candidates_ranked_by_overlap(self, kb):
        ranked = kb.top_candidates_by_overlap(["s1", "s2"], "categories", 10)
        scores = {
            e: kb.property_overlap_score(e, ["s1", "s2"], "categories") for e in ranked
        }
        assert sorted(scores.values(), reverse=True) == list(scores.values())
        assert "s3" not in ranked  # no shared category


class TestRedirects:
    def test_load(self):
        stream = io.BytesIO(b"a\tb\n\nbad line\nc\td\n")
        errors = []
        redirects = load_redirects(stream, on_error=errors.append)
        assert redirects == {"a": "b", "c": "d"}
        assert [e.line for e in errors] == [3]


@given(st.sets(st.sampled_from(["A", "B", "C", "D"]), max_size=4))
def test_overlap_never_exceeds_entity_properties(categories):
    kb = load_kb(
        kb_stream(
            [
                minimal("e", categories=sorted(categories)),
                minimal("s", categories=["A", "C"]),
            ]
        )
    )
    assert kb.property_overlap_score("e", ["s"], "categories") <= len(categories)
