#!/usr/bin/env python3
"""Build the lexically separable 12-relation corpus for classifier experiments.

Design: relations come in pairs sharing a right-column vocabulary, so bare
tables cannot fully distinguish a relation from its partner; every real
pair has one corpus sentence naming the relation's verb, so retrieved
contexts disambiguate. Evaluation tables are generated from a disjoint
slice of (left, right) pairs, which keeps pair memorization from leaking
across the split.

Outputs dataset fixtures (train/valid/eval JSON Lines plus the eval gold
file) consumable by anything that speaks the dataset schema.

Usage: python scripts/make_classifier_fixtures.py [--out DIR]
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

from kgtables.cli import main as kgtables_main
from kgtables.dataset_io import load_dataset

N_GROUPS = 6  # two relations per group -> 12 relations
LEFTS = [f"ent{i:03d}" for i in range(80)]
TRAIN_PAIRS_PER_RELATION = 40
EVAL_PAIRS_PER_RELATION = 15


def run(argv: list[str]) -> None:
    status = kgtables_main(argv)
    if status != 0:
        raise SystemExit(f"pipeline step failed with status {status}: {argv}")


def sample_pairs(rng, rights, used: set, count: int) -> list[tuple[str, str]]:
    pairs = []
    while len(pairs) < count:
        pair = (rng.choice(LEFTS), rng.choice(rights))
        if pair in used:
            continue
        used.add(pair)
        pairs.append(pair)
    return pairs


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="frontend/fixtures")
    parser.add_argument("--seed", type=int, default=2901)
    args = parser.parse_args()

    out = Path(args.out)
    inputs = out / "inputs"
    inputs.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)

    train_lines: list[str] = []
    eval_lines: list[str] = []
    corpus: list[dict] = []
    webtables: list[dict] = []
    para = 0
    for group in range(N_GROUPS):
        rights = [f"g{group}obj{i:02d}" for i in range(30)]
        used: set[tuple[str, str]] = set()  # pairs are unique inside a group
        for member in range(2):
            relation = f"r{group * 2 + member:02d}"
            verb = f"verb{group * 2 + member:02d}"
            train_pairs = sample_pairs(rng, rights, used, TRAIN_PAIRS_PER_RELATION)
            eval_pairs = sample_pairs(rng, rights, used, EVAL_PAIRS_PER_RELATION)
            for left, right in train_pairs:
                train_lines.append(f"{left}\t{relation}\t{right}\n")
            for left, right in eval_pairs:
                eval_lines.append(f"{left}\t{relation}\t{right}\n")
            for left, right in train_pairs + eval_pairs:
                text = f"{left} {verb} {right} here."
                corpus.append({"doc_id": "sep", "para_id": para, "text": text})
                para += 1
        webtables.append(
            {
                "table_id": f"wt{group}",
                "headers": ["name", f"kind{group}"],
                "columns": [list(LEFTS), rights],
            }
        )

    (inputs / "kg_train.tsv").write_text("".join(train_lines), encoding="utf-8")
    (inputs / "kg_eval.tsv").write_text("".join(eval_lines), encoding="utf-8")
    with (inputs / "corpus.jsonl").open("w", encoding="utf-8") as fh:
        for obj in corpus:
            fh.write(json.dumps(obj) + "\n")
    with (inputs / "webtables.jsonl").open("w", encoding="utf-8") as fh:
        for obj in webtables:
            fh.write(json.dumps(obj) + "\n")

    run(["build-index", "--corpus", str(inputs / "corpus.jsonl"), "--out", str(inputs / "index.pkl")])
    run(["build-header-map", "--tables", str(inputs / "webtables.jsonl"), "--out", str(inputs / "headmap.json")])

    run(
        [
            "generate",
            "--triples", str(inputs / "kg_train.tsv"),
            "--out", str(inputs / "train_full.jsonl"),
            "--seed", "11",
            "--tables-per-relation", "20",
            "--negative-fraction", "0.2",
        ]
    )
    run(
        [
            "enrich",
            "--dataset", str(inputs / "train_full.jsonl"),
            "--out", str(out / "trainset.jsonl"),
            "--context", "--index", str(inputs / "index.pkl"),
            "--headers", "--header-map", str(inputs / "headmap.json"),
            "--seed", "11",
        ]
    )
    run(["split", "--dataset", str(out / "trainset.jsonl"), "--train-ratio", "0.85", "--seed", "11"])

    run(
        [
            "generate",
            "--triples", str(inputs / "kg_eval.tsv"),
            "--out", str(inputs / "eval_raw.jsonl"),
            "--seed", "23",
            "--tables-per-relation", "6",
            "--negative-fraction", "0.2",
        ]
    )
    run(
        [
            "enrich",
            "--dataset", str(inputs / "eval_raw.jsonl"),
            "--out", str(out / "evalset.jsonl"),
            "--context", "--index", str(inputs / "index.pkl"),
            "--headers", "--header-map", str(inputs / "headmap.json"),
            "--seed", "23",
        ]
    )
    with (out / "eval_gold.jsonl").open("w", encoding="utf-8") as fh:
        for table in load_dataset(out / "evalset.jsonl"):
            fh.write(json.dumps({"table_id": table.table_id, "gold": table.relation_label}) + "\n")

    n_train = sum(1 for _ in load_dataset(out / "trainset.train.jsonl"))
    n_valid = sum(1 for _ in load_dataset(out / "trainset.valid.jsonl"))
    n_eval = sum(1 for _ in load_dataset(out / "evalset.jsonl"))
    print(f"fixtures ready: {n_train} train / {n_valid} valid / {n_eval} eval tables -> {out}/")


if __name__ == "__main__":
    main()
