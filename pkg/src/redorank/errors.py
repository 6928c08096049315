"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures onto its
stable contract: 2 config/usage, 3 external service, 4 data.
"""

from __future__ import annotations


class RedorankError(Exception):
    exit_code = 4


class ConfigError(RedorankError):
    exit_code = 2


class ServiceError(RedorankError):
    """An external service (search engine, remote scorer) failed."""

    exit_code = 3


class ClientError(ServiceError):
    def __init__(self, message: str, query_id: str | None = None):
        super().__init__(message if query_id is None else f"{query_id}: {message}")
        self.query_id = query_id


class ServiceUnavailable(ServiceError):
    pass


class DataError(RedorankError):
    exit_code = 4


class ValidationError(DataError):
    def __init__(self, message: str, doc_id: str | None = None):
        super().__init__(message if doc_id is None else f"{message} (doc_id={doc_id})")
        self.doc_id = doc_id


class DuplicateIdeal(ValidationError):
    pass


class MissingLabels(ValidationError):
    pass


class EmptySnippet(ValidationError):
    pass


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class MissingFeatures(DataError):
    pass


class SchemaMismatch(DataError):
    pass


class EmptyTermList(DataError):
    pass


class EmptyText(DataError):
    pass


class DomainError(DataError, ValueError):
    pass


class MalformedScore(DataError):
    pass


class ListTooLong(DataError):
    pass


class EmptyCorpus(DataError):
    pass


class InsufficientData(DataError):
    pass


class SingleClassData(DataError):
    pass


class EmptyTrainingSet(DataError):
    pass


class DegenerateLists(DataError):
    pass


class InsufficientQueries(DataError):
    pass


class CorruptModel(DataError):
    pass


class VersionMismatch(DataError):
    pass
