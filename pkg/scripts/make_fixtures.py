#!/usr/bin/env python3
"""Generate the bundled test fixtures deterministically.

Writes two corpora under tests/data/:

* synthetic/ - a randomized corpus (~150 tables, 80 entities) used for the
  brute-force oracle-equivalence checks and property tests.
* golden/    - a small hand-structured corpus (20 tables, 32 entities) with
  clustered content, used by the end-to-end evaluation golden test.  The
  clusters guarantee non-trivial metrics: two "loner" tables whose content
  appears nowhere else pin the zero-recall/zero-AP corner.

Both are pure functions of the seeds below; re-running reproduces the files
byte for byte.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tablepop.tables import Cell, Table, table_to_record  # noqa: E402

DATA_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"

SYNTHETIC_SEED = 20250811
ABSTRACT_VOCAB = (
    "field season team race car engine club player album music year city "
    "country river mountain lake bridge award film actor novel author game "
    "league premier studio record label chart final stadium circuit driver"
).split()
CAPTION_VOCAB = ABSTRACT_VOCAB + ["list", "of", "results", "history", "summary"]
LABEL_POOL = [
    "Year", "Team", "Name", "Date", "Dates", "date:", "Score", "Points",
    "Venue", "Engine Constructor", "Notes", "Rank", "Position", "Wins",
    "Album", "Label", "Country", "Time", "Laps", "Podiums",
]
PREDICATES = ["p:memberOf", "p:locatedIn", "p:genre", "p:winner", "p:partOf"]


def kb_record(
    eid: str,
    categories: list[str],
    types: list[str],
    triples: list[list[str]],
    outlinks: list[str],
    abstract: str,
) -> dict:
    return {
        "id": eid,
        "categories": categories,
        "types": types,
        "triples": triples,
        "outlinks": outlinks,
        "abstract": abstract,
    }


def write_ndjson(path: Path, records: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def make_synthetic() -> None:
    rng = random.Random(SYNTHETIC_SEED)
    entity_ids = [f"e{i:03d}" for i in range(80)]
    categories = [f"cat:{i}" for i in range(10)]
    types = [f"type:{i}" for i in range(5)]

    kb_records = []
    for i, eid in enumerate(entity_ids):
        cats = rng.sample(categories, rng.randint(1, 4))
        typs = rng.sample(types, rng.randint(0, 2))
        outlinks = rng.sample([e for e in entity_ids if e != eid], rng.randint(0, 12))
        # Five entities get no abstract to exercise the candidate-pool flag.
        if i < 5:
            abstract = ""
        else:
            abstract = " ".join(rng.choices(ABSTRACT_VOCAB, k=rng.randint(5, 40)))
        triples = []
        for _ in range(rng.randint(0, 5)):
            pred = rng.choice(PREDICATES)
            if rng.random() < 0.7:
                target = rng.choice([e for e in entity_ids if e != eid])
            else:
                target = f"lit:{rng.randint(0, 30)}"
            triples.append([eid, pred, target])
        kb_records.append(kb_record(eid, cats, typs, triples, outlinks, abstract))

    tables = []
    for i in range(150):
        tid = f"t{i:03d}"
        caption = " ".join(rng.choices(CAPTION_VOCAB, k=rng.randint(2, 8)))
        if i < 40:
            # Entity-focused block: unique entities, >=6 rows, >=4 columns.
            n_rows = rng.randint(6, 9)
            headings = rng.sample(LABEL_POOL, rng.randint(4, 6))
            lead = rng.sample(entity_ids, n_rows)
            rows = []
            for r, eid in enumerate(lead):
                row = [Cell(text=eid, entity=eid)]
                row.extend(Cell(text=f"v{r}:{c}") for c in range(1, len(headings)))
                rows.append(tuple(row))
        else:
            n_rows = rng.randint(1, 10)
            headings = rng.sample(LABEL_POOL, rng.randint(1, 6))
            rows = []
            for r in range(n_rows):
                if rng.random() < 0.7:
                    eid = rng.choice(entity_ids)
                    first = Cell(text=eid, entity=eid)
                else:
                    first = Cell(text=f"text{r}")
                row = [first]
                row.extend(Cell(text=f"v{r}:{c}") for c in range(1, len(headings)))
                rows.append(tuple(row))
        tables.append(Table(id=tid, caption=caption, headings=tuple(headings), rows=tuple(rows)))

    write_ndjson(DATA_DIR / "synthetic" / "kb.ndjson", kb_records)
    write_ndjson(
        DATA_DIR / "synthetic" / "corpus.ndjson", [table_to_record(t) for t in tables]
    )


def _entity_table(tid, caption, headings, entities, fill="x"):
    rows = []
    for r, eid in enumerate(entities):
        row = [Cell(text=eid, entity=eid)]
        row.extend(Cell(text=f"{fill}{r}:{c}") for c in range(1, len(headings)))
        rows.append(tuple(row))
    return Table(id=tid, caption=caption, headings=tuple(headings), rows=tuple(rows))


def make_golden() -> None:
    rng = random.Random(7)
    football = [f"club{i:02d}" for i in range(10)]
    albums = [f"album{i:02d}" for i in range(8)]
    loners = [f"widget{i:02d}" for i in range(12)]
    others = ["city00", "city01"]

    kb_records = []
    for i, eid in enumerate(football):
        outlinks = [e for e in football if e != eid][: 4 + (i % 4)]
        triples = [[eid, "p:league", "league:premier"], [eid, "p:sport", "sport:football"]]
        if i % 2 == 0:
            triples.append([eid, "p:city", others[0]])
        kb_records.append(
            kb_record(
                eid,
                ["cat:football-club", "cat:sports-team"],
                ["type:organisation"],
                triples,
                outlinks,
                f"{eid} is a professional football club playing in the premier league season",
            )
        )
    for i, eid in enumerate(albums):
        outlinks = [e for e in albums if e != eid][: 3 + (i % 3)]
        triples = [[eid, "p:genre", "genre:rock"], [eid, "p:artist", f"artist:{i % 3}"]]
        kb_records.append(
            kb_record(
                eid,
                ["cat:studio-album", "cat:music"],
                ["type:work"],
                triples,
                outlinks,
                f"{eid} is a studio album released by a rock band with chart success",
            )
        )
    for i, eid in enumerate(loners):
        kb_records.append(
            kb_record(
                eid,
                [f"cat:widget-{i}"],
                [],
                [[eid, "p:madeOf", f"material:{i}"]],
                [],
                f"{eid} is an obscure widget of unusual provenance",
            )
        )
    for eid in others:
        kb_records.append(
            kb_record(
                eid,
                ["cat:city"],
                ["type:place"],
                [[eid, "p:country", "country:x"]],
                [],
                f"{eid} is a city with a large stadium",
            )
        )

    tables = []
    football_headings = [
        ["Club", "Season", "Points", "Rank"],
        ["Club", "Season", "Points", "Wins"],
        ["Club", "Points", "Rank", "Notes"],
        ["Club", "Season", "Rank", "Venue"],
        ["Club", "Season", "Points", "Rank"],
    ]
    for i in range(5):
        members = [football[(i + j) % len(football)] for j in range(6 + i % 2)]
        tables.append(
            _entity_table(
                f"g{i:02d}",
                f"premier league season {2000 + i} results table",
                football_headings[i],
                members,
            )
        )
    album_headings = [
        ["Album", "Year", "Label", "Notes"],
        ["Album", "Date", "Label", "Notes"],
        ["Album", "Dates", "Label", "Rank"],
        ["Album", "date:", "Label", "Notes"],
        ["Album", "Year", "Label", "Rank"],
    ]
    for i in range(5):
        members = [albums[(i + j) % len(albums)] for j in range(6)]
        tables.append(
            _entity_table(
                f"g{5 + i:02d}",
                f"studio album discography volume {i}",
                album_headings[i],
                members,
            )
        )
    tables.append(
        _entity_table(
            "g10",
            "obscure widget catalogue one",
            ["Widget", "Mass", "Color", "Origin"],
            loners[:6],
        )
    )
    tables.append(
        _entity_table(
            "g11",
            "obscure widget catalogue two",
            ["Gadget", "Weight", "Shade", "Source"],
            loners[6:],
        )
    )
    # Background tables: non-entity-focused, mixed content, duplicate leads.
    for i in range(8):
        tid = f"b{i:02d}"
        if i % 2 == 0:
            pool = football
            caption = "football premier league history summary"
            headings = ["Club", "Points"] if i % 4 == 0 else ["Club", "Season", "Points"]
        else:
            pool = albums
            caption = "rock album chart history"
            headings = ["Album", "Year"] if i % 4 == 1 else ["Album", "Year", "Label"]
        n_rows = 3 + (i % 3)
        rows = []
        for r in range(n_rows):
            if r == 0 and i % 3 == 0:
                first = Cell(text="plain text lead")
            else:
                eid = pool[(i * 3 + r) % len(pool)]
                first = Cell(text=eid, entity=eid)
            row = [first]
            row.extend(Cell(text=f"w{r}:{c}") for c in range(1, len(headings)))
            rows.append(tuple(row))
        tables.append(Table(id=tid, caption=caption, headings=tuple(headings), rows=tuple(rows)))

    assert len(tables) == 20, len(tables)
    write_ndjson(DATA_DIR / "golden" / "kb.ndjson", kb_records)
    write_ndjson(
        DATA_DIR / "golden" / "corpus.ndjson", [table_to_record(t) for t in tables]
    )
    with open(DATA_DIR / "golden" / "redirects.tsv", "w", encoding="utf-8") as fh:
        fh.write("club99\tclub00\n")
    del rng


def main() -> None:
    make_synthetic()
    make_golden()
    print(f"fixtures written under {DATA_DIR}")


if __name__ == "__main__":
    main()
