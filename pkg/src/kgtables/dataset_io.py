"""Dataset JSON Lines serialization, validation and table-level splitting.

One table per line:
``{"table_id": str, "relation": str, "headers": [str, str], "rows": [...]}``
with ``headers`` present only on header-enriched tables and each row
``{"left": str, "right": str, "context": str}`` carrying ``context`` only
when a snippet was retrieved. ``__NEGATIVE__`` is a legal relation value.

Emission order is deterministic: relation label ascending, then table
ordinal ascending, so identical inputs always produce identical bytes.
"""

from __future__ import annotations

import json
import random
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DatasetError
from .tables import Row, SyntheticTable

__all__ = [
    "table_to_obj",
    "obj_to_table",
    "emit_dataset",
    "load_dataset",
    "validate_table",
    "split_dataset",
]

_TABLE_KEYS = {"table_id", "relation", "headers", "rows"}
_ROW_KEYS = {"left", "right", "context"}


def table_to_obj(table: SyntheticTable) -> dict:
    obj: dict = {"table_id": table.table_id, "relation": table.relation_label}
    if table.headers is not None:
        obj["headers"] = [table.headers[0], table.headers[1]]
    rows = []
    for row in table.rows:
        row_obj: dict = {"left": row.left, "right": row.right}
        if row.context is not None:
            row_obj["context"] = row.context
        rows.append(row_obj)
    obj["rows"] = rows
    return obj


def obj_to_table(obj: dict, where: str = "<memory>") -> SyntheticTable:
    if not isinstance(obj, dict):
        raise DatasetError(f"{where}: expected an object")
    extra = set(obj) - _TABLE_KEYS
    if extra:
        raise DatasetError(f"{where}: unknown table keys {sorted(extra)}")
    table_id = obj.get("table_id")
    relation = obj.get("relation")
    rows_obj = obj.get("rows")
    if not isinstance(table_id, str) or not table_id:
        raise DatasetError(f"{where}: table_id must be a non-empty string")
    if not isinstance(relation, str) or not relation:
        raise DatasetError(f"{where}: relation must be a non-empty string")
    if not isinstance(rows_obj, list) or not rows_obj:
        raise DatasetError(f"{where}: rows must be a non-empty list")
    headers = None
    if "headers" in obj:
        headers_obj = obj["headers"]
        if (
            not isinstance(headers_obj, list)
            or len(headers_obj) != 2
            or not all(isinstance(h, str) for h in headers_obj)
        ):
            raise DatasetError(f"{where}: headers must be a pair of strings")
        headers = (headers_obj[0], headers_obj[1])
    rows = []
    for i, row_obj in enumerate(rows_obj):
        if not isinstance(row_obj, dict):
            raise DatasetError(f"{where}: row {i} must be an object")
        extra = set(row_obj) - _ROW_KEYS
        if extra:
            raise DatasetError(f"{where}: row {i} has unknown keys {sorted(extra)}")
        left = row_obj.get("left")
        right = row_obj.get("right")
        context = row_obj.get("context")
        if not isinstance(left, str) or not left:
            raise DatasetError(f"{where}: row {i} left cell must be a non-empty string")
        if not isinstance(right, str) or not right:
            raise DatasetError(f"{where}: row {i} right cell must be a non-empty string")
        if context is not None and not isinstance(context, str):
            raise DatasetError(f"{where}: row {i} context must be a string")
        rows.append(Row(left=left, right=right, context=context))
    return SyntheticTable(
        table_id=table_id, relation_label=relation, rows=tuple(rows), headers=headers
    )


def _ordinal_key(table: SyntheticTable, position: int) -> tuple:
    if table.provenance is not None:
        return (table.relation_label, table.provenance.ordinal, position)
    # Reloaded tables carry the ordinal in their id ("<relation>#<n>").
    _, sep, suffix = table.table_id.rpartition("#")
    if sep and suffix.isdigit():
        return (table.relation_label, int(suffix), position)
    return (table.relation_label, position, position)


def emit_dataset(tables: Iterable[SyntheticTable], path: str | Path) -> int:
    """Write tables as JSON Lines in canonical order; returns the count."""
    ordered = [
        t
        for _, t in sorted(
            ((_ordinal_key(t, i), t) for i, t in enumerate(tables)), key=lambda kt: kt[0]
        )
    ]
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for table in ordered:
                fh.write(json.dumps(table_to_obj(table), ensure_ascii=False, separators=(",", ":")))
                fh.write("\n")
    except OSError as exc:
        raise DatasetError(f"cannot write dataset to {path}: {exc}") from exc
    return len(ordered)


def load_dataset(path: str | Path) -> Iterator[SyntheticTable]:
    path = Path(path)
    try:
        fh = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read dataset from {path}: {exc}") from exc
    with fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            yield obj_to_table(obj, where=f"{path}:{line_no}")


def validate_table(
    table: SyntheticTable, rows_min: int | None = None, rows_max: int | None = None
) -> None:
    """Re-check the structural table invariants; raises DatasetError on violation.

    Row-count bounds are checked only when provided, since they are a
    generation-config property rather than a schema property.
    """
    if rows_min is not None and len(table.rows) < rows_min:
        raise DatasetError(f"table {table.table_id!r}: {len(table.rows)} rows < min {rows_min}")
    if rows_max is not None and len(table.rows) > rows_max:
        raise DatasetError(f"table {table.table_id!r}: {len(table.rows)} rows > max {rows_max}")
    for row in table.rows:
        if not row.left or not row.right:
            raise DatasetError(f"table {table.table_id!r}: empty cell")
    if not table.is_negative:
        pairs = [(r.left, r.right) for r in table.rows]
        if len(set(pairs)) != len(pairs):
            raise DatasetError(f"table {table.table_id!r}: duplicate rows in a positive table")
    elif table.provenance is not None:
        if len(set(table.provenance.relations)) < 2:
            raise DatasetError(
                f"table {table.table_id!r}: negative table without two distinct source relations"
            )


def split_dataset(
    path: str | Path, ratios: tuple[float, float], rng: random.Random
) -> tuple[Path, Path]:
    """Random table-level split of a dataset file into train/validation files.

    Validation receives ``floor(validation_ratio * n)`` tables chosen by
    the rng; every line of the input lands in exactly one output, with
    original line bytes and relative order preserved.
    """
    train_ratio, val_ratio = ratios
    if train_ratio < 0 or val_ratio < 0:
        raise DatasetError(f"split ratios must be non-negative, got {ratios}")
    if abs(train_ratio + val_ratio - 1.0) > 1e-9:
        raise DatasetError(f"split ratios must sum to 1, got {ratios}")
    path = Path(path)
    try:
        lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    except OSError as exc:
        raise DatasetError(f"cannot read dataset from {path}: {exc}") from exc
    # floor(ratio * n), with an epsilon absorbing float noise such as
    # (1.0 - 0.8) * 20 -> 3.999...
    n_val = int(val_ratio * len(lines) + 1e-9)
    val_indices = set(rng.sample(range(len(lines)), n_val)) if n_val else set()
    train_path = path.with_suffix(".train.jsonl")
    val_path = path.with_suffix(".valid.jsonl")
    with train_path.open("w", encoding="utf-8", newline="\n") as train_fh, val_path.open(
        "w", encoding="utf-8", newline="\n"
    ) as val_fh:
        for i, line in enumerate(lines):
            target = val_fh if i in val_indices else train_fh
            target.write(line)
            target.write("\n")
    return train_path, val_path
