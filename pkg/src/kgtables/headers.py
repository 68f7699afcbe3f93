"""Column-header inference from a web-table corpus.

A one-pass build counts, for every cell value, how often it appeared
under each column header. Header inference for a synthetic column then
takes each cell's most frequent header as a candidate and returns the
modal candidate, drawing uniformly among ties.

Table-corpus input is JSON Lines, one object per table:
``{"table_id": str, "headers": [str...], "columns": [[str...]...]}``.
"""

from __future__ import annotations

import json
import random
import re
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import CorpusFormatError, TableCorpusError
from .tables import SyntheticTable

__all__ = [
    "TableCorpusRecord",
    "EntityHeaderMap",
    "normalize_key",
    "read_table_corpus",
    "build_entity_header_map",
    "entity_candidate_header",
    "infer_column_header",
    "enrich_with_headers",
    "save_header_map",
    "load_header_map",
]

_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class TableCorpusRecord:
    table_id: str
    headers: tuple[str, ...]
    columns: tuple[tuple[str, ...], ...]


@dataclass
class EntityHeaderMap:
    """counts[entity][header] = times the entity appeared under that header."""

    counts: dict[str, dict[str, int]]

    def __len__(self) -> int:
        return len(self.counts)


def normalize_key(text: str) -> str:
    """Lowercase, trim, collapse internal whitespace."""
    return _WS_RE.sub(" ", text.strip()).lower()


def read_table_corpus(path: str | Path) -> Iterator[TableCorpusRecord]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            table_id = obj.get("table_id")
            headers = obj.get("headers")
            columns = obj.get("columns")
            if not isinstance(table_id, str) or not table_id:
                raise CorpusFormatError(f"{path}:{line_no}: table_id must be a non-empty string")
            if not isinstance(headers, list) or not all(isinstance(h, str) for h in headers):
                raise CorpusFormatError(f"{path}:{line_no}: headers must be a list of strings")
            if not isinstance(columns, list) or not all(
                isinstance(col, list) and all(isinstance(c, str) for c in col) for col in columns
            ):
                raise CorpusFormatError(
                    f"{path}:{line_no}: columns must be a list of string lists"
                )
            yield TableCorpusRecord(
                table_id=table_id,
                headers=tuple(headers),
                columns=tuple(tuple(col) for col in columns),
            )


def build_entity_header_map(records: Iterable[TableCorpusRecord]) -> EntityHeaderMap:
    """Tally (entity, header) co-occurrences over a table stream.

    Cells or headers that normalize to the empty string are skipped. The
    build is order-insensitive: permuting the input records yields an
    identical map.
    """
    counts: dict[str, dict[str, int]] = {}
    for rec in records:
        if len(rec.headers) != len(rec.columns):
            raise TableCorpusError(
                f"table {rec.table_id!r}: {len(rec.headers)} headers but "
                f"{len(rec.columns)} columns"
            )
        for header, column in zip(rec.headers, rec.columns):
            h = normalize_key(header)
            if not h:
                continue
            for cell in column:
                e = normalize_key(cell)
                if not e:
                    continue
                per_entity = counts.setdefault(e, {})
                per_entity[h] = per_entity.get(h, 0) + 1
    return EntityHeaderMap(counts={e: dict(sorted(hs.items())) for e, hs in sorted(counts.items())})


def entity_candidate_header(header_map: EntityHeaderMap, entity: str) -> str | None:
    """Most frequent header for an entity; lexicographic tie-break; None if unknown."""
    per_entity = header_map.counts.get(normalize_key(entity))
    if not per_entity:
        return None
    return min(per_entity.items(), key=lambda kv: (-kv[1], kv[0]))[0]


def infer_column_header(
    header_map: EntityHeaderMap, cells: Sequence[str], rng: random.Random
) -> str | None:
    """Modal per-cell header candidate for a column.

    Cells without a map entry contribute nothing. When several headers
    share the top count, one is chosen uniformly; exactly one rng draw is
    consumed per tied decision and none otherwise, so seeded runs
    reproduce.
    """
    candidates = [
        c for c in (entity_candidate_header(header_map, cell) for cell in cells) if c is not None
    ]
    if not candidates:
        return None
    tally = Counter(candidates)
    top = max(tally.values())
    tied = sorted(h for h, n in tally.items() if n == top)
    if len(tied) == 1:
        return tied[0]
    return tied[rng.randrange(len(tied))]


def enrich_with_headers(
    table: SyntheticTable, header_map: EntityHeaderMap, rng: random.Random
) -> SyntheticTable:
    """Infer (left, right) headers for a table; unknown sides become "".

    The left column is inferred before the right one so rng consumption
    order is fixed.
    """
    left = infer_column_header(header_map, [r.left for r in table.rows], rng)
    right = infer_column_header(header_map, [r.right for r in table.rows], rng)
    return replace(table, headers=(left or "", right or ""))


def save_header_map(header_map: EntityHeaderMap, path: str | Path) -> None:
    """Write the map as canonical JSON (sorted keys, round-trips bit-exactly)."""
    payload = json.dumps(
        {"counts": header_map.counts}, ensure_ascii=False, sort_keys=True, separators=(",", ":")
    )
    Path(path).write_text(payload + "\n", encoding="utf-8")


def load_header_map(path: str | Path) -> EntityHeaderMap:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    counts = obj.get("counts")
    if not isinstance(counts, dict):
        raise CorpusFormatError(f"{path} is not a header-map snapshot")
    return EntityHeaderMap(counts=counts)
