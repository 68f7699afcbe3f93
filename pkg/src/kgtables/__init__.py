"""Synthetic relation-extraction tables from knowledge-graph triples.

Pipeline stages: parse and group fact triples, sample positive/negative
2-column tables, retrieve per-row text contexts from an embedded BM25
index, infer column headers from a web-table corpus, and score relation
predictions with micro P/R/F1.
"""

from .context import ContextSnippet, SnippetKind, enrich_with_context, retrieve_context
from .errors import KgTablesError
from .headers import EntityHeaderMap, build_entity_header_map, enrich_with_headers
from .index import CorpusIndex, ParagraphRecord, and_query, build_index
from .scoring import EvalReport, micro_prf
from .tables import (
    NEGATIVE_LABEL,
    GenerationConfig,
    Row,
    SyntheticTable,
    generate_dataset,
    generate_negative_table,
    generate_positive_table,
)
from .triples import FactTriple, RelationStore, group_by_relation, parse_triples

__version__ = "0.1.0"

__all__ = [
    "ContextSnippet",
    "SnippetKind",
    "enrich_with_context",
    "retrieve_context",
    "KgTablesError",
    "EntityHeaderMap",
    "build_entity_header_map",
    "enrich_with_headers",
    "CorpusIndex",
    "ParagraphRecord",
    "and_query",
    "build_index",
    "EvalReport",
    "micro_prf",
    "NEGATIVE_LABEL",
    "GenerationConfig",
    "Row",
    "SyntheticTable",
    "generate_dataset",
    "generate_negative_table",
    "generate_positive_table",
    "FactTriple",
    "RelationStore",
    "group_by_relation",
    "parse_triples",
    "__version__",
]
