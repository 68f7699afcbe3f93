"""Context harvesting for entity pairs: AND query, filtering, sentence pick.

The cascade for a pair (e1, e2) is: run the logical-AND query, keep the
top 10 by score, drop paragraphs shorter than ``len(e1) + len(e2) + 3``
characters, take the best surviving paragraph, then pick its topmost
sentence mentioning both entities. If no single sentence mentions both,
the first sentence mentioning e1 and the first mentioning e2 are joined
with one space instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable

from .errors import ContextContractError, QueryError
from .index import CorpusIndex, ParagraphRecord, ScoredParagraph, and_query, phrase_in_text
from .tables import Row, SyntheticTable

__all__ = [
    "SnippetKind",
    "ContextSnippet",
    "length_filter",
    "split_sentences",
    "select_context",
    "retrieve_context",
    "enrich_with_context",
]

# Sentence boundary: terminator followed by whitespace (end-of-text splits
# implicitly). Deliberately no abbreviation handling: "Mr. Smith" splits.
_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")


class SnippetKind(Enum):
    CO_SENTENTIAL = "co_sentential"
    CONCATENATED = "concatenated"


@dataclass(frozen=True)
class ContextSnippet:
    text: str
    kind: SnippetKind
    source: tuple[str, int]


def length_filter(
    candidates: Iterable[ScoredParagraph],
    e1: str,
    e2: str,
    index: CorpusIndex,
) -> list[ScoredParagraph]:
    """Drop paragraphs with fewer characters than len(e1) + len(e2) + 3.

    Lengths are counted in Unicode scalar values over the cleaned text;
    candidate order is preserved.
    """
    threshold = len(e1) + len(e2) + 3
    return [sp for sp in candidates if len(index.store[sp.ref].text) >= threshold]


def split_sentences(text: str) -> list[str]:
    parts = _SENTENCE_SPLIT_RE.split(text)
    return [p.strip() for p in parts if p.strip()]


def select_context(paragraph: ParagraphRecord, e1: str, e2: str) -> ContextSnippet:
    """Pick the context snippet from a paragraph known to mention both entities.

    Returns the first sentence containing both phrases when one exists;
    otherwise concatenates the first sentence containing e1 with the
    first containing e2 (in that order, joined by a single space).
    Raises :class:`ContextContractError` when either phrase cannot be
    found in any single sentence, e.g. because the upstream filter is
    broken or the phrase's only occurrence straddles a sentence boundary.
    """
    sentences = split_sentences(paragraph.text)
    for sentence in sentences:
        if phrase_in_text(sentence, e1) and phrase_in_text(sentence, e2):
            return ContextSnippet(
                text=sentence, kind=SnippetKind.CO_SENTENTIAL, source=paragraph.ref
            )
    first_e1 = next((s for s in sentences if phrase_in_text(s, e1)), None)
    first_e2 = next((s for s in sentences if phrase_in_text(s, e2)), None)
    if first_e1 is None or first_e2 is None:
        missing = e1 if first_e1 is None else e2
        raise ContextContractError(
            f"paragraph {paragraph.ref!r} has no sentence containing {missing!r}"
        )
    return ContextSnippet(
        text=f"{first_e1} {first_e2}", kind=SnippetKind.CONCATENATED, source=paragraph.ref
    )


def retrieve_context(
    index: CorpusIndex, e1: str, e2: str, k: int = 10
) -> ContextSnippet | None:
    """Run the full cascade for one entity pair; None when nothing qualifies."""
    hits = and_query(index, e1, e2, k=k)
    survivors = length_filter(hits, e1, e2, index)
    if not survivors:
        return None
    best = survivors[0]
    return select_context(index.store[best.ref], e1, e2)


def _as_phrase(cell: str) -> str:
    # Labels arrive with underscores from many KG dumps; queries use the
    # human-readable surface form.
    return cell.replace("_", " ")


def enrich_with_context(table: SyntheticTable, index: CorpusIndex, k: int = 10) -> SyntheticTable:
    """Attach a retrieved snippet to every row that has corpus support.

    Rows without support get no context. Rows whose cells normalize to
    nothing (pure punctuation) and paragraphs that defeat sentence
    selection are treated as unsupported rather than errors, so
    enrichment never aborts a dataset. Pure function of (table, index):
    enriching twice equals enriching once.
    """
    new_rows: list[Row] = []
    for row in table.rows:
        try:
            snippet = retrieve_context(index, _as_phrase(row.left), _as_phrase(row.right), k=k)
        except (QueryError, ContextContractError):
            snippet = None
        new_rows.append(replace(row, context=snippet.text if snippet else None))
    return replace(table, rows=tuple(new_rows))
