"""Synthesis of labelled 2-column tables from a relation store.

Positive tables sample rows without replacement from a single relation's
triples. Negative tables mix the left column of one positive table with
the right column of another table of a different relation and carry the
``__NEGATIVE__`` sentinel label.

Every table gets its own RNG seeded from a stable hash of
``(master_seed, relation, ordinal)``, so per-relation generation is
order-independent and reproducible across runs and machines.
"""

from __future__ import annotations

import hashlib
import logging
import math
import random
from dataclasses import dataclass, replace
from typing import Iterator, Sequence

from .errors import ConfigError, GenerationError, RelationTooSmallError
from .triples import RelationStore

__all__ = [
    "NEGATIVE_LABEL",
    "Row",
    "Provenance",
    "SyntheticTable",
    "GenerationConfig",
    "derive_rng",
    "sample_row_count",
    "generate_positive_table",
    "generate_negative_table",
    "generate_dataset",
]

log = logging.getLogger(__name__)

# Sentinel spelled so it cannot collide with a real relation identifier.
NEGATIVE_LABEL = "__NEGATIVE__"


@dataclass(frozen=True)
class Row:
    left: str
    right: str
    context: str | None = None


@dataclass(frozen=True)
class Provenance:
    """How a table was produced: source relation(s), seed, generation ordinal."""

    relations: tuple[str, ...]
    seed: int
    ordinal: int
    sources: tuple[str, ...] = ()


@dataclass(frozen=True)
class SyntheticTable:
    table_id: str
    relation_label: str
    rows: tuple[Row, ...]
    headers: tuple[str, str] | None = None
    provenance: Provenance | None = None

    @property
    def is_negative(self) -> bool:
        return self.relation_label == NEGATIVE_LABEL


@dataclass(frozen=True)
class GenerationConfig:
    master_seed: int = 0
    rows_min: int = 5
    rows_max: int = 10
    tables_per_relation: int = 1
    negative_fraction: float = 0.0

    def validate(self) -> None:
        if not 1 <= self.rows_min:
            raise ConfigError(f"rows_min must be >= 1, got {self.rows_min}")
        if self.rows_min > self.rows_max:
            raise ConfigError(
                f"rows_min ({self.rows_min}) must not exceed rows_max ({self.rows_max})"
            )
        if self.tables_per_relation < 0:
            raise ConfigError("tables_per_relation must be >= 0")
        if not 0.0 <= self.negative_fraction <= 1.0:
            raise ConfigError("negative_fraction must be in [0, 1]")


def derive_seed(master_seed: int, *parts: str) -> int:
    """Stable 64-bit seed from a master seed plus string parts.

    Uses blake2b rather than hash() so results do not depend on
    PYTHONHASHSEED or platform.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(master_seed).encode("utf-8"))
    for part in parts:
        h.update(b"\x1f")
        h.update(part.encode("utf-8"))
    return int.from_bytes(h.digest(), "big")


def derive_rng(master_seed: int, *parts: str) -> random.Random:
    return random.Random(derive_seed(master_seed, *parts))


def sample_row_count(rng: random.Random, bounds: tuple[int, int]) -> int:
    """Uniform integer row count over an inclusive interval."""
    lo, hi = bounds
    if lo > hi:
        raise ConfigError(f"row-count bounds ({lo}, {hi}) have min > max")
    return rng.randint(lo, hi)


def generate_positive_table(
    store: RelationStore,
    relation: str,
    rng: random.Random,
    *,
    rows_min: int = 5,
    rows_max: int = 10,
    table_id: str | None = None,
    ordinal: int = 0,
    seed: int = 0,
) -> SyntheticTable:
    """Sample one positive table for ``relation``.

    The row count is drawn uniformly from ``[rows_min, rows_max]`` with
    the upper bound clamped to the number of available triples, then that
    many distinct triples are sampled without replacement. Relations with
    fewer than ``rows_min`` triples raise :class:`RelationTooSmallError`
    so callers can skip them.
    """
    triples = store.triples_for(relation)
    if not triples:
        raise RelationTooSmallError(relation, 0, rows_min)
    if len(triples) < rows_min:
        raise RelationTooSmallError(relation, len(triples), rows_min)
    upper = min(rows_max, len(triples))
    n_rows = sample_row_count(rng, (rows_min, upper))
    sampled = rng.sample(triples, n_rows)
    rows = tuple(Row(left=t.subject, right=t.object) for t in sampled)
    return SyntheticTable(
        table_id=table_id if table_id is not None else f"{relation}#{ordinal}",
        relation_label=relation,
        rows=rows,
        provenance=Provenance(relations=(relation,), seed=seed, ordinal=ordinal),
    )


def generate_negative_table(
    pool: Sequence[SyntheticTable],
    rng: random.Random,
    *,
    table_id: str | None = None,
    ordinal: int = 0,
    seed: int = 0,
) -> SyntheticTable:
    """Mix the columns of two pool tables with distinct relation labels.

    Left cells come from the first chosen table and right cells from the
    second; both are truncated to the shorter table's row count and
    paired by index. Contexts are dropped because they described the
    original pairs, not the mixed ones.
    """
    if len(pool) < 2:
        raise GenerationError("negative generation needs a pool of at least 2 tables")
    labels = {t.relation_label for t in pool}
    if len(labels) < 2:
        raise GenerationError("negative generation needs at least 2 distinct relations in the pool")
    first = pool[rng.randrange(len(pool))]
    others = [t for t in pool if t.relation_label != first.relation_label]
    second = others[rng.randrange(len(others))]
    n_rows = min(len(first.rows), len(second.rows))
    rows = tuple(
        Row(left=a.left, right=b.right)
        for a, b in zip(first.rows[:n_rows], second.rows[:n_rows])
    )
    return SyntheticTable(
        table_id=table_id if table_id is not None else f"{NEGATIVE_LABEL}#{ordinal}",
        relation_label=NEGATIVE_LABEL,
        rows=rows,
        provenance=Provenance(
            relations=(first.relation_label, second.relation_label),
            seed=seed,
            ordinal=ordinal,
            sources=(first.table_id, second.table_id),
        ),
    )


def generate_dataset(store: RelationStore, config: GenerationConfig) -> Iterator[SyntheticTable]:
    """Yield the full synthetic dataset for one configuration.

    Positive tables come first, relations in sorted order with ordinals
    ascending, followed by ``ceil(negative_fraction * positives)``
    negative tables. Relations too small for ``rows_min`` are skipped
    with a warning instead of aborting the stream.
    """
    config.validate()
    positives: list[SyntheticTable] = []
    for relation in sorted(store.relations):
        for i in range(config.tables_per_relation):
            seed = derive_seed(config.master_seed, relation, str(i))
            rng = random.Random(seed)
            try:
                table = generate_positive_table(
                    store,
                    relation,
                    rng,
                    rows_min=config.rows_min,
                    rows_max=config.rows_max,
                    table_id=f"{relation}#{i}",
                    ordinal=i,
                    seed=seed,
                )
            except RelationTooSmallError as exc:
                log.warning("skipping relation %r: %s", relation, exc)
                break
            positives.append(table)
            yield table

    n_negative = math.ceil(config.negative_fraction * len(positives))
    if n_negative == 0:
        return
    if len({t.relation_label for t in positives}) < 2:
        log.warning("skipping %d negative tables: need 2 distinct relations", n_negative)
        return
    for j in range(n_negative):
        seed = derive_seed(config.master_seed, NEGATIVE_LABEL, str(j))
        rng = random.Random(seed)
        yield generate_negative_table(
            positives, rng, table_id=f"{NEGATIVE_LABEL}#{j}", ordinal=j, seed=seed
        )


def with_rows(table: SyntheticTable, rows: Sequence[Row]) -> SyntheticTable:
    return replace(table, rows=tuple(rows))
