"""Per-resource scoring: readability, educational alignment, objectionability and the mixer."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError, EmptyText
from .model import FEATURE_SCHEMA, JudgedList, LtrRow, Resource
from .objectionability import Forest, TermLists, features_from_terms
from .scorers import EduScorer, ReadabilityConfig, mixer, s_read
from .scorers.educational import check_score
from .textproc import TextConfig

logger = logging.getLogger(__name__)

# content-less resources (allowed only for known-bad ones) get the hardest grade
NO_TEXT_GRADE = 13.0


@dataclass
class FeaturePipeline:
    text: TextConfig
    term_lists: TermLists
    readability: ReadabilityConfig
    edu: EduScorer
    forest: Forest | None = None
    features: tuple[str, ...] = FEATURE_SCHEMA
    force_bad_cost: bool = False

    def __post_init__(self) -> None:
        self.features = tuple(self.features)
        unknown = [f for f in self.features if f not in FEATURE_SCHEMA]
        if unknown or not self.features:
            raise ConfigError(f"features must be a non-empty subset of {FEATURE_SCHEMA}, got {self.features}")
        if "s_bad" in self.features and self.forest is None:
            raise ConfigError("s_bad requested but no judge model is configured")

    def obj_vector(self, snippet: str) -> list[float]:
        terms = self.text.normalize(snippet)
        return features_from_terms(terms, self.term_lists, self.text.dictionary).as_vector()

    def scores(self, resources: Sequence[Resource]) -> list[dict[str, float]]:
        edu = [check_score(v) for v in self.edu.score_many(resources)]
        if self.forest is not None and resources:
            bad = self.forest.predict_proba([self.obj_vector(r.snippet) for r in resources]).tolist()
        else:
            bad = [0.0] * len(resources)
        out = []
        for r, e, b in zip(resources, edu, bad):
            try:
                grade = s_read(r.snippet, self.readability)
            except EmptyText:
                if not r.is_known_bad:
                    raise
                grade = NO_TEXT_GRADE
            out.append({"s_read": grade, "s_edu": e, "s_bad": float(b), "mixer": mixer(grade, e)})
        return out

    def rows(self, judged: JudgedList) -> list[LtrRow]:
        """Feature rows for one list, emitted in presentation (source rank) order."""
        resources = sorted(judged.resources, key=lambda r: r.source_rank)
        rows = []
        for r, sc in zip(resources, self.scores(resources)):
            cost = 1.0 if (self.force_bad_cost and r.is_known_bad) else sc["s_bad"]
            label = r.label if r.label is not None else 0
            rows.append(LtrRow.from_scores(judged.query_id, r.doc_id, label, sc, self.features, cost))
        return rows
