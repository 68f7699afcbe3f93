"""Command-line pipeline driver.

Subcommands mirror the three cacheable assets plus the dataset flows:

  build-index       paragraphs.jsonl -> index snapshot
  build-header-map  webtables.jsonl  -> header-map snapshot
  generate          triples.tsv      -> dataset.jsonl
  enrich            dataset.jsonl    -> dataset with contexts/headers
  split             dataset.jsonl    -> .train.jsonl / .valid.jsonl
  score             gold + pred      -> JSON report on stdout

Flags override values from an optional JSON config file, which overrides
the built-in defaults. All progress goes to stderr; exit status is 0 on
success, 1 on pipeline errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import dataset_io, headers, index, scoring, tables, triples
from .context import enrich_with_context
from .errors import ConfigError, KgTablesError

__all__ = ["PipelineConfig", "main", "entrypoint"]

log = logging.getLogger("kgtables")


@dataclass
class PipelineConfig:
    master_seed: int = 0
    rows_min: int = 5
    rows_max: int = 10
    tables_per_relation: int = 1
    negative_fraction: float = 0.0
    top_k: int = 10
    train_ratio: float = 0.8

    @property
    def split_ratios(self) -> tuple[float, float]:
        return (self.train_ratio, 1.0 - self.train_ratio)

    def validate(self) -> None:
        self.generation().validate()
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")
        train, val = self.split_ratios
        if train < 0 or val < 0 or abs(train + val - 1.0) > 1e-9:
            raise ConfigError(f"split ratios must be non-negative and sum to 1, got {self.split_ratios}")

    def generation(self) -> tables.GenerationConfig:
        return tables.GenerationConfig(
            master_seed=self.master_seed,
            rows_min=self.rows_min,
            rows_max=self.rows_max,
            tables_per_relation=self.tables_per_relation,
            negative_fraction=self.negative_fraction,
        )


_FLAG_TO_FIELD = {
    "seed": "master_seed",
    "rows_min": "rows_min",
    "rows_max": "rows_max",
    "tables_per_relation": "tables_per_relation",
    "negative_fraction": "negative_fraction",
    "top_k": "top_k",
    "train_ratio": "train_ratio",
}


def build_config(args: argparse.Namespace) -> PipelineConfig:
    """Merge defaults, optional JSON config file and explicit flags."""
    values: dict = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {config_path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {config_path} must hold a JSON object")
        known = {f.name for f in fields(PipelineConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        values.update(raw)
    for flag, field_name in _FLAG_TO_FIELD.items():
        flag_value = getattr(args, flag, None)
        if flag_value is not None:
            values[field_name] = flag_value
    config = PipelineConfig(**values)
    config.validate()
    return config


def _add_config_flags(parser: argparse.ArgumentParser, *names: str) -> None:
    parser.add_argument("--config", metavar="FILE", help="JSON config file (flags override it)")
    flag_specs = {
        "seed": dict(type=int, help="master seed for all randomized steps"),
        "rows_min": dict(type=int, help="minimum rows per table"),
        "rows_max": dict(type=int, help="maximum rows per table"),
        "tables_per_relation": dict(type=int, help="positive tables per relation"),
        "negative_fraction": dict(type=float, help="negative tables as a fraction of positives"),
        "top_k": dict(type=int, help="retrieval depth for context queries"),
        "train_ratio": dict(type=float, help="train fraction for the split"),
    }
    for name in names:
        spec = flag_specs[name]
        parser.add_argument(f"--{name.replace('_', '-')}", default=None, dest=name, **spec)


def cmd_build_index(args: argparse.Namespace) -> int:
    records = index.read_paragraphs(args.corpus)
    idx = index.build_index(records)
    index.save_index(idx, args.out)
    log.info("indexed %d paragraphs (avg length %.2f tokens) -> %s", idx.doc_count, idx.avg_len, args.out)
    return 0


def cmd_build_header_map(args: argparse.Namespace) -> int:
    records = headers.read_table_corpus(args.tables)
    header_map = headers.build_entity_header_map(records)
    headers.save_header_map(header_map, args.out)
    log.info("header map covers %d entities -> %s", len(header_map), args.out)
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    config = build_config(args)
    store = triples.group_by_relation(triples.load_triples(args.triples))
    log.info("loaded %d triples across %d relations", len(store), len(store.relations))
    count = dataset_io.emit_dataset(
        tables.generate_dataset(store, config.generation()), args.out
    )
    log.info("wrote %d tables -> %s", count, args.out)
    return 0


def cmd_enrich(args: argparse.Namespace) -> int:
    config = build_config(args)
    if not args.context and not args.headers:
        log.error("nothing to do: pass --context and/or --headers")
        return 2
    if args.context and not args.index:
        log.error("--context requires --index")
        return 2
    if args.headers and not args.header_map:
        log.error("--headers requires --header-map")
        return 2
    corpus_index = index.load_index(args.index) if args.context else None
    header_map = headers.load_header_map(args.header_map) if args.headers else None
    enriched = []
    n_contexts = 0
    for table in dataset_io.load_dataset(args.dataset):
        if corpus_index is not None:
            table = enrich_with_context(table, corpus_index, k=config.top_k)
            n_contexts += sum(1 for r in table.rows if r.context is not None)
        if header_map is not None:
            rng = tables.derive_rng(config.master_seed, "headers", table.table_id)
            table = headers.enrich_with_headers(table, header_map, rng)
        enriched.append(table)
    count = dataset_io.emit_dataset(enriched, args.out)
    if corpus_index is not None:
        log.info("attached %d row contexts", n_contexts)
    log.info("wrote %d enriched tables -> %s", count, args.out)
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    config = build_config(args)
    rng = tables.derive_rng(config.master_seed, "split")
    train_path, val_path = dataset_io.split_dataset(args.dataset, config.split_ratios, rng)
    log.info("split %s -> %s / %s", args.dataset, train_path, val_path)
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    gold = scoring.read_gold(args.gold)
    pred = scoring.read_predictions(args.pred)
    report = scoring.micro_prf(gold, pred, negative_label=args.negative_label)
    print(report.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgtables",
        description="Synthetic relation-extraction tables from knowledge-graph triples.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-index", help="build the paragraph inverted index")
    p.add_argument("--corpus", required=True, help="paragraph corpus (JSON Lines)")
    p.add_argument("--out", required=True, help="index snapshot output path")
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("build-header-map", help="build the entity-to-header map")
    p.add_argument("--tables", required=True, help="web-table corpus (JSON Lines)")
    p.add_argument("--out", required=True, help="header-map snapshot output path")
    p.set_defaults(func=cmd_build_header_map)

    p = sub.add_parser("generate", help="generate labelled synthetic tables")
    p.add_argument("--triples", required=True, help="tab-separated triple dump")
    p.add_argument("--out", required=True, help="dataset output path (JSON Lines)")
    _add_config_flags(
        p, "seed", "rows_min", "rows_max", "tables_per_relation", "negative_fraction"
    )
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("enrich", help="attach contexts and/or headers to a dataset")
    p.add_argument("--dataset", required=True, help="input dataset (JSON Lines)")
    p.add_argument("--out", required=True, help="enriched dataset output path")
    p.add_argument("--context", action="store_true", help="attach retrieved row contexts")
    p.add_argument("--headers", action="store_true", help="attach inferred column headers")
    p.add_argument("--index", help="index snapshot (required with --context)")
    p.add_argument("--header-map", dest="header_map", help="header-map snapshot (required with --headers)")
    _add_config_flags(p, "seed", "top_k")
    p.set_defaults(func=cmd_enrich)

    p = sub.add_parser("split", help="split a dataset into train/validation files")
    p.add_argument("--dataset", required=True, help="dataset to split (JSON Lines)")
    _add_config_flags(p, "seed", "train_ratio")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("score", help="micro P/R/F1 of predictions against gold labels")
    p.add_argument("--gold", required=True, help='gold labels ({"table_id", "gold"} JSON Lines)')
    p.add_argument("--pred", required=True, help='predictions ({"table_id", "pred"} JSON Lines)')
    p.add_argument("--negative-label", default=tables.NEGATIVE_LABEL, help="abstention label")
    p.set_defaults(func=cmd_score)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return 2
    except KgTablesError as exc:
        log.error("%s", exc)
        return 1
    except OSError as exc:
        log.error("i/o failure: %s", exc)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
