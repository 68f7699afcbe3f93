"""Embedded inverted index with BM25 scoring over a paragraph corpus.

The index is built once from a stream of cleaned paragraph records and is
immutable afterwards, so concurrent readers need no locking. Queries are
logical-AND phrase queries: a paragraph qualifies only if it contains both
entity phrases as contiguous token sequences, and qualifying paragraphs
are ranked by Okapi BM25 over the union of the two phrases' tokens.

Corpus input is JSON Lines, one object per paragraph:
``{"doc_id": str, "para_id": int, "text": str}``. Text is cleaned at the
ingestion boundary (HTML tags stripped, control characters removed,
whitespace collapsed); the index stores cleaned text only.
"""

from __future__ import annotations

import bisect
import json
import math
import pickle
import re
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import CorpusFormatError, IndexBuildError, QueryError

__all__ = [
    "BM25_K1",
    "BM25_B",
    "ParagraphRecord",
    "ScoredParagraph",
    "CorpusIndex",
    "clean_text",
    "normalize_and_tokenize",
    "read_paragraphs",
    "build_index",
    "contains_phrase",
    "phrase_in_text",
    "bm25_score",
    "and_query",
    "save_index",
    "load_index",
]

BM25_K1 = 1.2
BM25_B = 0.75

# (doc_id, para_id) uniquely identifies a paragraph; tuples sort the way
# posting lists are ordered.
ParaRef = tuple[str, int]

_TAG_RE = re.compile(r"<[^>]*>")
# \w minus underscore == Unicode alphanumeric runs.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class ParagraphRecord:
    doc_id: str
    para_id: int
    text: str

    @property
    def ref(self) -> ParaRef:
        return (self.doc_id, self.para_id)


@dataclass(frozen=True)
class ScoredParagraph:
    ref: ParaRef
    score: float


@dataclass(frozen=True)
class CorpusIndex:
    """Frozen inverted index plus the statistics BM25 needs.

    ``postings`` maps each term to its posting list: (paragraph ref,
    term frequency) pairs sorted by ref with no duplicates. ``lengths``
    holds per-paragraph token counts, ``doc_count`` the number of
    paragraphs and ``avg_len`` their mean token count.
    """

    postings: dict[str, tuple[tuple[ParaRef, int], ...]]
    lengths: dict[ParaRef, int]
    doc_count: int
    avg_len: float
    store: dict[ParaRef, ParagraphRecord]


def clean_text(raw: str) -> str:
    """Strip HTML tags and control characters, collapse whitespace."""
    no_tags = _TAG_RE.sub(" ", raw)
    printable = "".join(
        " " if unicodedata.category(ch) in ("Cc", "Cf") else ch for ch in no_tags
    )
    return " ".join(printable.split())


def normalize_and_tokenize(text: str) -> list[str]:
    """Lowercase and split into maximal alphanumeric runs.

    Every non-alphanumeric codepoint (including underscore) acts as a
    separator, so "B.B.C. 2024" tokenizes to [b, b, c, 2024].
    """
    return _TOKEN_RE.findall(text.lower())


def read_paragraphs(path: str | Path) -> Iterator[ParagraphRecord]:
    """Stream cleaned paragraph records from a JSON Lines corpus file.

    Records whose text is empty after cleaning are dropped; malformed
    lines raise :class:`CorpusFormatError`.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise CorpusFormatError(f"{path}:{line_no}: expected an object")
            doc_id = obj.get("doc_id")
            para_id = obj.get("para_id")
            text = obj.get("text")
            if not isinstance(doc_id, str) or not doc_id:
                raise CorpusFormatError(f"{path}:{line_no}: doc_id must be a non-empty string")
            if not isinstance(para_id, int) or isinstance(para_id, bool) or para_id < 0:
                raise CorpusFormatError(f"{path}:{line_no}: para_id must be a non-negative integer")
            if not isinstance(text, str):
                raise CorpusFormatError(f"{path}:{line_no}: text must be a string")
            cleaned = clean_text(text)
            if not cleaned:
                continue
            yield ParagraphRecord(doc_id=doc_id, para_id=para_id, text=cleaned)


def build_index(records: Iterable[ParagraphRecord]) -> CorpusIndex:
    """Single-pass index build. Duplicate (doc_id, para_id) pairs are an error."""
    tf_acc: dict[str, dict[ParaRef, int]] = {}
    lengths: dict[ParaRef, int] = {}
    store: dict[ParaRef, ParagraphRecord] = {}
    total_tokens = 0
    for rec in records:
        ref = rec.ref
        if ref in store:
            raise IndexBuildError(f"duplicate paragraph reference {ref!r}")
        tokens = normalize_and_tokenize(rec.text)
        store[ref] = rec
        lengths[ref] = len(tokens)
        total_tokens += len(tokens)
        for tok in tokens:
            per_term = tf_acc.setdefault(tok, {})
            per_term[ref] = per_term.get(ref, 0) + 1
    postings = {term: tuple(sorted(refs.items())) for term, refs in tf_acc.items()}
    n = len(store)
    return CorpusIndex(
        postings=postings,
        lengths=lengths,
        doc_count=n,
        avg_len=(total_tokens / n) if n else 0.0,
        store=store,
    )


def _contains_tokens(haystack: list[str], needle: list[str]) -> bool:
    n = len(needle)
    if n == 0 or n > len(haystack):
        return False
    first = needle[0]
    for i in range(len(haystack) - n + 1):
        if haystack[i] == first and haystack[i : i + n] == needle:
            return True
    return False


def phrase_in_text(text: str, phrase: str) -> bool:
    """True iff the normalized phrase occurs contiguously in the text's tokens."""
    needle = normalize_and_tokenize(phrase)
    if not needle:
        raise QueryError(f"phrase {phrase!r} is empty after normalization")
    return _contains_tokens(normalize_and_tokenize(text), needle)


def contains_phrase(record: ParagraphRecord, phrase: str) -> bool:
    return phrase_in_text(record.text, phrase)


def _term_freq(index: CorpusIndex, term: str, ref: ParaRef) -> int:
    plist = index.postings.get(term, ())
    pos = bisect.bisect_left(plist, ref, key=lambda p: p[0])
    if pos < len(plist) and plist[pos][0] == ref:
        return plist[pos][1]
    return 0


def idf(index: CorpusIndex, term: str) -> float:
    df = len(index.postings.get(term, ()))
    return math.log(1.0 + (index.doc_count - df + 0.5) / (df + 0.5))


def bm25_score(index: CorpusIndex, ref: ParaRef, query_terms: Iterable[str]) -> float:
    """Okapi BM25 over distinct query terms; absent terms contribute 0."""
    if ref not in index.lengths:
        raise QueryError(f"unknown paragraph reference {ref!r}")
    length = index.lengths[ref]
    score = 0.0
    for term in dict.fromkeys(query_terms):
        tf = _term_freq(index, term, ref)
        if tf == 0:
            continue
        norm = 1.0 - BM25_B + BM25_B * (length / index.avg_len)
        score += idf(index, term) * (tf * (BM25_K1 + 1.0)) / (tf + BM25_K1 * norm)
    return score


def and_query(
    index: CorpusIndex, phrase1: str, phrase2: str, k: int = 10
) -> list[ScoredParagraph]:
    """Paragraphs containing both phrases, BM25-ranked, truncated to k.

    Candidates are exactly the paragraphs where both phrases occur as
    contiguous token sequences. They are scored over the union of both
    phrases' tokens and sorted by score descending, ties broken by
    (doc_id, para_id) ascending.
    """
    if k < 1:
        raise QueryError(f"k must be >= 1, got {k}")
    tokens1 = normalize_and_tokenize(phrase1)
    tokens2 = normalize_and_tokenize(phrase2)
    if not tokens1:
        raise QueryError(f"phrase {phrase1!r} is empty after normalization")
    if not tokens2:
        raise QueryError(f"phrase {phrase2!r} is empty after normalization")

    # Term-level AND prefilter: phrase containment implies every token is
    # present, so intersecting posting lists cannot drop a true candidate.
    candidates: set[ParaRef] | None = None
    for term in dict.fromkeys(tokens1 + tokens2):
        refs = {ref for ref, _ in index.postings.get(term, ())}
        candidates = refs if candidates is None else candidates & refs
        if not candidates:
            return []
    assert candidates is not None

    query_terms = list(dict.fromkeys(tokens1 + tokens2))
    hits: list[ScoredParagraph] = []
    for ref in candidates:
        rec_tokens = normalize_and_tokenize(index.store[ref].text)
        if not (_contains_tokens(rec_tokens, tokens1) and _contains_tokens(rec_tokens, tokens2)):
            continue
        hits.append(ScoredParagraph(ref=ref, score=bm25_score(index, ref, query_terms)))
    hits.sort(key=lambda sp: (-sp.score, sp.ref))
    return hits[:k]


def save_index(index: CorpusIndex, path: str | Path) -> None:
    """Snapshot the index to disk (pickle; load with :func:`load_index`)."""
    with Path(path).open("wb") as fh:
        pickle.dump(index, fh, protocol=pickle.HIGHEST_PROTOCOL)


def load_index(path: str | Path) -> CorpusIndex:
    with Path(path).open("rb") as fh:
        index = pickle.load(fh)
    if not isinstance(index, CorpusIndex):
        raise IndexBuildError(f"{path} does not contain a corpus index snapshot")
    return index
