"""Shared deterministic fixture builders.

Fixtures are synthesized in-process from fixed seeds instead of being
committed as files, so tests stay hermetic and the corpora can be sized
per test.
"""

from __future__ import annotations

import random

import pytest

from kgtables.headers import TableCorpusRecord
from kgtables.index import ParagraphRecord
from kgtables.triples import FactTriple, group_by_relation

FILLER = (
    "the of a in on under near since while through against almost between "
    "city river road north south old new great small known famous local "
    "region member group work time year people place part house station"
).split()

ENTITIES = [f"ent{i:02d}" for i in range(24)] + [
    "new york",
    "san marino",
    "rio grande",
    "port royal",
    "lake garda",
    "mount kenya",
]


def make_kg_lines(n_relations: int = 20, triples_per: int = 30) -> list[bytes]:
    lines = []
    for r in range(n_relations):
        rel = f"rel{r:02d}"
        for i in range(triples_per):
            lines.append(f"s{r:02d}_{i:03d}\t{rel}\to{r:02d}_{i:03d}\n".encode())
    return lines


def make_kg_store(n_relations: int = 20, triples_per: int = 30):
    triples = [
        FactTriple(f"s{r:02d}_{i:03d}", f"rel{r:02d}", f"o{r:02d}_{i:03d}")
        for r in range(n_relations)
        for i in range(triples_per)
    ]
    return group_by_relation(triples)


def make_paragraphs(n: int = 500, seed: int = 20240) -> list[ParagraphRecord]:
    """Random filler text salted with entity mentions; ~LF-clean prose."""
    rng = random.Random(seed)
    records = []
    for i in range(n):
        n_sentences = rng.randint(1, 4)
        sentences = []
        for _ in range(n_sentences):
            words = rng.choices(FILLER, k=rng.randint(3, 9))
            for _ in range(rng.randint(0, 3)):
                words.insert(rng.randrange(len(words) + 1), rng.choice(ENTITIES))
            sentences.append(" ".join(words).capitalize() + rng.choice([".", ".", "!", "?"]))
        records.append(
            ParagraphRecord(doc_id=f"doc{i // 10:03d}", para_id=i % 10, text=" ".join(sentences))
        )
    return records


def make_webtables(n: int = 200, seed: int = 77) -> list[TableCorpusRecord]:
    rng = random.Random(seed)
    headers_pool = [
        "city", "country", "river", "capital", "team", "player",
        "company", "product", "author", "book", "town", "region",
    ]
    entity_pool = [f"item {i:02d}" for i in range(60)] + ENTITIES
    records = []
    for t in range(n):
        n_cols = rng.randint(1, 4)
        headers = [rng.choice(headers_pool) for _ in range(n_cols)]
        columns = [
            [rng.choice(entity_pool) for _ in range(rng.randint(2, 8))] for _ in range(n_cols)
        ]
        records.append(
            TableCorpusRecord(
                table_id=f"wt{t:04d}",
                headers=tuple(headers),
                columns=tuple(tuple(col) for col in columns),
            )
        )
    return records


@pytest.fixture(scope="session")
def kg_store():
    return make_kg_store()


@pytest.fixture(scope="session")
def paragraphs_500():
    return make_paragraphs(500)


@pytest.fixture(scope="session")
def webtables_200():
    return make_webtables(200)
