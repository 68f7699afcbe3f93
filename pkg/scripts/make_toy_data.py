#!/usr/bin/env python3
"""Emit a small demo input set: triple dump, paragraph corpus, web tables.

Usage: python scripts/make_toy_data.py [--out DIR] [--relations N] [--triples-per N]
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

VERBS = ["borders", "governs", "feeds", "links", "owns", "hosts", "follows", "joins"]
FILLER = "the a region nearby known historic local famous wide old".split()


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="toy_data", help="output directory")
    parser.add_argument("--relations", type=int, default=8)
    parser.add_argument("--triples-per", type=int, default=25)
    parser.add_argument("--seed", type=int, default=13)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)

    kg_lines = []
    corpus = []
    webtables = []
    para = 0
    for r in range(args.relations):
        rel = f"rel{r:02d}"
        lefts, rights = [], []
        for i in range(args.triples_per):
            left = f"subj{r:02d}x{i:03d}"
            right = f"objt{r:02d}x{i:03d}"
            kg_lines.append(f"{left}\t{rel}\t{right}\n")
            lefts.append(left)
            rights.append(right)
            if rng.random() < 0.7:  # most pairs get corpus support
                words = rng.choices(FILLER, k=rng.randint(2, 5))
                text = f"{left} {VERBS[r % len(VERBS)]} {right} {' '.join(words)}."
                corpus.append({"doc_id": "toy", "para_id": para, "text": text})
                para += 1
        webtables.append(
            {
                "table_id": f"wt{r:02d}",
                "headers": [f"head{r:02d}L", f"head{r:02d}R"],
                "columns": [lefts, rights],
            }
        )

    (out / "kg.tsv").write_text("".join(kg_lines), encoding="utf-8")
    with (out / "corpus.jsonl").open("w", encoding="utf-8") as fh:
        for obj in corpus:
            fh.write(json.dumps(obj) + "\n")
    with (out / "webtables.jsonl").open("w", encoding="utf-8") as fh:
        for obj in webtables:
            fh.write(json.dumps(obj) + "\n")
    print(f"wrote {len(kg_lines)} triples, {len(corpus)} paragraphs, {len(webtables)} web tables -> {out}/")


if __name__ == "__main__":
    main()
