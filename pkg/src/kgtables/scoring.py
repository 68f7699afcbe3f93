"""Micro precision/recall/F1 between gold and predicted relation labels.

Predicting the negative label is an abstention: it is excluded from the
precision denominator, and negative gold entries are excluded from the
recall denominator. Raw counts are reported so other conventions can be
recomputed without rescoring.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Mapping

from .errors import ScoringError
from .tables import NEGATIVE_LABEL

__all__ = ["EvalReport", "micro_prf", "read_gold", "read_predictions"]


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    n_pred: int
    n_gold: int
    n_correct: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def micro_prf(
    gold: Mapping[str, str],
    pred: Mapping[str, str],
    negative_label: str = NEGATIVE_LABEL,
) -> EvalReport:
    """Pooled micro P/R/F1; any zero denominator makes that metric 0."""
    for table_id in pred:
        if table_id not in gold:
            raise ScoringError(f"prediction for unknown id {table_id!r}")
    n_pred = sum(1 for label in pred.values() if label != negative_label)
    n_gold = sum(1 for label in gold.values() if label != negative_label)
    n_correct = sum(
        1
        for table_id, label in pred.items()
        if label != negative_label and gold[table_id] == label
    )
    precision = n_correct / n_pred if n_pred else 0.0
    recall = n_correct / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        n_pred=n_pred,
        n_gold=n_gold,
        n_correct=n_correct,
    )


def _read_label_file(path: str | Path, value_key: str) -> dict[str, str]:
    path = Path(path)
    labels: dict[str, str] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ScoringError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            table_id = obj.get("table_id")
            value = obj.get(value_key)
            if not isinstance(table_id, str) or not isinstance(value, str):
                raise ScoringError(
                    f"{path}:{line_no}: expected string table_id and {value_key}"
                )
            if table_id in labels:
                raise ScoringError(f"{path}:{line_no}: duplicate id {table_id!r}")
            labels[table_id] = value
    return labels


def read_gold(path: str | Path) -> dict[str, str]:
    return _read_label_file(path, "gold")


def read_predictions(path: str | Path) -> dict[str, str]:
    return _read_label_file(path, "pred")
