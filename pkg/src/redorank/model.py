"""Shared data model: resources, judged lists, score triples and LTR rows."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import (
    DomainError,
    DuplicateIdeal,
    EmptySnippet,
    MissingLabels,
    ValidationError,
)

LABELS = (0, 1, 2)
FEATURE_SCHEMA = ("s_read", "s_edu", "s_bad", "mixer")
READ_RANGE = (0.0, 13.0)


def gain(label: int, mapping: str = "exp") -> float:
    """Relevance gain of a graded label: ``2**label - 1`` or, linearly, ``label``."""
    if mapping == "exp":
        return float(2**label - 1)
    if mapping == "linear":
        return float(label)
    raise ValueError(f"unknown gain mapping {mapping!r}")


@dataclass(frozen=True)
class Resource:
    """One retrieved web result. ``snippet`` stands in for the page content."""

    url: str
    title: str
    snippet: str
    source_rank: int
    label: int | None = None
    is_known_bad: bool = False
    is_ideal: bool = False
    id: str | None = None

    def __post_init__(self) -> None:
        if self.source_rank < 1:
            raise ValidationError(f"source_rank must be >= 1, got {self.source_rank}", self.doc_id)
        if self.label is not None and self.label not in LABELS:
            raise ValidationError(f"label must be one of {LABELS}, got {self.label}", self.doc_id)
        if self.is_ideal and self.label != 2:
            raise ValidationError("ideal resource must carry label 2", self.doc_id)
        if self.is_known_bad and self.label != 0:
            raise ValidationError("known-bad resource must carry label 0", self.doc_id)
        if self.is_ideal and self.is_known_bad:
            raise ValidationError("resource cannot be both ideal and known-bad", self.doc_id)

    @property
    def doc_id(self) -> str:
        return self.id if self.id is not None else self.url


@dataclass(frozen=True)
class JudgedList:
    query_id: str
    query_text: str
    resources: tuple[Resource, ...] = ()

    def __post_init__(self) -> None:
        # accept any sequence, store a tuple so the list stays immutable
        object.__setattr__(self, "resources", tuple(self.resources))

    def __len__(self) -> int:
        return len(self.resources)

    @property
    def labelled(self) -> bool:
        return bool(self.resources) and all(r.label is not None for r in self.resources)

    def labels(self) -> list[int]:
        return [r.label for r in self.resources]


def validate_list(judged: JudgedList) -> JudgedList:
    """Check the judged-list invariants; return the list unchanged when they hold."""
    ideals = [r for r in judged.resources if r.is_ideal]
    if len(ideals) > 1:
        raise DuplicateIdeal(f"{judged.query_id}: {len(ideals)} ideal resources", ideals[1].doc_id)
    present = [r.label is not None for r in judged.resources]
    if any(present) and not all(present):
        missing = next(r for r in judged.resources if r.label is None)
        raise MissingLabels(f"{judged.query_id}: labels present on some resources only", missing.doc_id)
    for r in judged.resources:
        if not r.snippet.strip() and not r.is_known_bad:
            raise EmptySnippet(f"{judged.query_id}: empty snippet", r.doc_id)
    return judged


@dataclass(frozen=True)
class ScoreTriple:
    s_read: float
    s_edu: float
    s_bad: float

    def __post_init__(self) -> None:
        lo, hi = READ_RANGE
        if not lo <= self.s_read <= hi:
            raise DomainError(f"s_read {self.s_read} outside [{lo}, {hi}]")
        for name in ("s_edu", "s_bad"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} {value} outside [0, 1]")


@dataclass(frozen=True)
class LtrRow:
    """Per-document feature row; ``features`` follows the dataset's declared schema."""

    query_id: str
    doc_id: str
    label: int
    features: tuple[float, ...]
    cost: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "features", tuple(float(v) for v in self.features))
        if self.label not in LABELS:
            raise ValidationError(f"label must be one of {LABELS}, got {self.label}", self.doc_id)
        if not 0.0 <= self.cost <= 1.0:
            raise DomainError(f"cost {self.cost} outside [0, 1] (doc_id={self.doc_id})")

    @classmethod
    def from_scores(
        cls,
        query_id: str,
        doc_id: str,
        label: int,
        scores: Mapping[str, float],
        schema: Sequence[str] = FEATURE_SCHEMA,
        cost: float | None = None,
    ) -> "LtrRow":
        """Build a row from named scores. Cost falls back to ``s_bad`` (or 0 if absent)."""
        features = tuple(scores[name] for name in schema)
        if cost is None:
            cost = scores.get("s_bad", 0.0)
        return cls(query_id, doc_id, label, features, cost)


@dataclass
class FeatureTable:
    """Rows grouped by query, in file order, with the schema they were written under."""

    schema: tuple[str, ...]
    rows: list[LtrRow] = field(default_factory=list)

    def by_query(self) -> dict[str, list[LtrRow]]:
        grouped: dict[str, list[LtrRow]] = {}
        for row in self.rows:
            grouped.setdefault(row.query_id, []).append(row)
        return grouped
