"""Parsing of knowledge-graph fact dumps and grouping of facts by relation.

Input format: UTF-8 text, one fact per line, three tab-separated fields
``subject\trelation\tobject``. No header row, no escaping; tabs and
newlines inside fields are illegal input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import TripleParseError

__all__ = ["FactTriple", "RelationStore", "parse_triples", "load_triples", "group_by_relation"]


@dataclass(frozen=True)
class FactTriple:
    """One knowledge-graph fact: (subject, relation, object)."""

    subject: str
    relation: str
    object: str


@dataclass(frozen=True)
class RelationStore:
    """Fact triples grouped by relation, deduplicated, in first-seen order."""

    relations: dict[str, tuple[FactTriple, ...]]
    counts: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.counts:
            object.__setattr__(
                self, "counts", {r: len(ts) for r, ts in self.relations.items()}
            )

    def triples_for(self, relation: str) -> tuple[FactTriple, ...]:
        return self.relations.get(relation, ())

    def __len__(self) -> int:
        return sum(self.counts.values())


def parse_triples(stream: IO[bytes] | Iterable[bytes], source_name: str) -> list[FactTriple]:
    """Parse a byte stream of tab-separated triple lines.

    Returns triples in input order; duplicates are preserved here and
    collapsed later by :func:`group_by_relation`. A line with a field
    count other than 3, an empty field, or invalid UTF-8 raises
    :class:`TripleParseError` carrying ``source_name`` and the 1-based
    line number.
    """
    triples: list[FactTriple] = []
    for line_no, raw in enumerate(stream, start=1):
        try:
            line = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TripleParseError(source_name, line_no, f"invalid UTF-8: {exc}") from exc
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise TripleParseError(
                source_name, line_no, f"expected 3 tab-separated fields, got {len(fields)}"
            )
        subject, relation, obj = (f.strip() for f in fields)
        if not subject or not relation or not obj:
            raise TripleParseError(source_name, line_no, "empty field")
        if any("\r" in f for f in (subject, relation, obj)):
            raise TripleParseError(source_name, line_no, "carriage return inside a field")
        triples.append(FactTriple(subject, relation, obj))
    return triples


def load_triples(path: str | Path) -> list[FactTriple]:
    path = Path(path)
    with path.open("rb") as fh:
        return parse_triples(fh, source_name=str(path))


def group_by_relation(triples: Iterable[FactTriple]) -> RelationStore:
    """Group triples by relation, dropping exact (s, r, o) duplicates.

    First-seen order is preserved for both relations and the triples
    within each relation, so identical input always produces an
    identical store, including iteration order.
    """
    grouped: dict[str, dict[FactTriple, None]] = {}
    for triple in triples:
        grouped.setdefault(triple.relation, {})[triple] = None
    relations = {r: tuple(seen.keys()) for r, seen in grouped.items()}
    return RelationStore(relations=relations)


def iter_relations(store: RelationStore) -> Iterator[str]:
    return iter(store.relations)
