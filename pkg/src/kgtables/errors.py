"""Exception types shared across the pipeline."""


class KgTablesError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(KgTablesError):
    """Invalid generation or pipeline configuration."""


class TripleParseError(KgTablesError):
    """Malformed line in a triple dump."""

    def __init__(self, source_name: str, line_no: int, message: str):
        super().__init__(f"{source_name}:{line_no}: {message}")
        self.source_name = source_name
        self.line_no = line_no


class GenerationError(KgTablesError):
    """Table generation could not proceed (bad pool, unknown relation, ...)."""


class RelationTooSmallError(GenerationError):
    """A relation has fewer triples than the minimum row count."""

    def __init__(self, relation: str, available: int, needed: int):
        super().__init__(
            f"relation {relation!r} has {available} triples, need at least {needed}"
        )
        self.relation = relation
        self.available = available
        self.needed = needed


class CorpusFormatError(KgTablesError):
    """Malformed paragraph or web-table corpus input."""


class IndexBuildError(KgTablesError):
    """Inverted-index construction failed."""


class QueryError(KgTablesError):
    """Invalid retrieval query (empty phrase, bad k, unknown paragraph)."""


class ContextContractError(KgTablesError):
    """A paragraph handed to sentence selection does not contain both phrases.

    Signals a broken upstream filter, or a phrase whose only occurrence
    spans a sentence boundary.
    """


class TableCorpusError(KgTablesError):
    """Malformed web-table record during header-map ingestion."""


class DatasetError(KgTablesError):
    """Dataset file violates the JSON Lines table schema."""


class ScoringError(KgTablesError):
    """Gold/prediction inputs unusable for evaluation."""
