#!/usr/bin/env python3
"""End-to-end demo: build assets, generate, enrich, split and self-score.

Usage: python scripts/run_toy_pipeline.py [--workdir DIR] [--seed N]
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys
from pathlib import Path

from kgtables.cli import main as kgtables_main
from kgtables.dataset_io import load_dataset


def run(argv: list[str]) -> None:
    print(f"$ kgtables {' '.join(argv)}", file=sys.stderr)
    status = kgtables_main(argv)
    if status != 0:
        raise SystemExit(f"step failed with status {status}: {argv}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default="toy_run")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    work = Path(args.workdir)
    work.mkdir(parents=True, exist_ok=True)
    subprocess.run(
        [sys.executable, str(Path(__file__).with_name("make_toy_data.py")), "--out", str(work)],
        check=True,
    )

    seed = str(args.seed)
    run(["build-index", "--corpus", str(work / "corpus.jsonl"), "--out", str(work / "index.pkl")])
    run(["build-header-map", "--tables", str(work / "webtables.jsonl"), "--out", str(work / "headmap.json")])
    run(
        [
            "generate",
            "--triples", str(work / "kg.tsv"),
            "--out", str(work / "dataset.jsonl"),
            "--seed", seed,
            "--tables-per-relation", "10",
            "--negative-fraction", "0.2",
        ]
    )
    run(
        [
            "enrich",
            "--dataset", str(work / "dataset.jsonl"),
            "--out", str(work / "enriched.jsonl"),
            "--context", "--index", str(work / "index.pkl"),
            "--headers", "--header-map", str(work / "headmap.json"),
            "--seed", seed,
        ]
    )
    run(["split", "--dataset", str(work / "enriched.jsonl"), "--train-ratio", "0.8", "--seed", seed])

    tables = list(load_dataset(work / "enriched.jsonl"))
    n_ctx = sum(1 for t in tables for r in t.rows if r.context is not None)
    n_rows = sum(len(t.rows) for t in tables)
    print(f"{len(tables)} tables, {n_ctx}/{n_rows} rows with context")

    # self-score sanity line: gold against itself must be perfect
    gold_path = work / "gold.jsonl"
    pred_path = work / "pred.jsonl"
    with gold_path.open("w", encoding="utf-8") as gfh, pred_path.open("w", encoding="utf-8") as pfh:
        for t in tables:
            gfh.write(json.dumps({"table_id": t.table_id, "gold": t.relation_label}) + "\n")
            pfh.write(json.dumps({"table_id": t.table_id, "pred": t.relation_label}) + "\n")
    run(["score", "--gold", str(gold_path), "--pred", str(pred_path)])


if __name__ == "__main__":
    main()
