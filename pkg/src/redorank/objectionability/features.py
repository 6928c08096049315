"""Lexicon-based objectionability features over a snippet.

Sixteen values per snippet: term prevalence and term coverage for each of the
seven categories (alphabetical category order), then misspelling prevalence
and misspelling coverage.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..errors import ConfigError, EmptyTermList, ParseError
from ..textproc import (
    LemmaRules,
    SpellDictionary,
    TermSequence,
    data_path,
    is_misspelled,
    normalize,
)

CATEGORIES = (
    "Abortion",
    "Drugs",
    "Gambling",
    "HateSpeech",
    "IllegalAffairs",
    "Pornography",
    "Violence",
)
MAX_TERMS = 100
FEATURE_NAMES = (
    tuple(f"tp_{c}" for c in CATEGORIES)
    + tuple(f"tcov_{c}" for c in CATEGORIES)
    + ("mp", "mc")
)
N_FEATURES = len(FEATURE_NAMES)


@dataclass(frozen=True)
class TermLists:
    per_category: Mapping[str, frozenset[str]]

    def __post_init__(self) -> None:
        cats = set(self.per_category)
        if cats != set(CATEGORIES):
            missing = sorted(set(CATEGORIES) - cats)
            extra = sorted(cats - set(CATEGORIES))
            raise ConfigError(f"term lists must cover exactly {CATEGORIES}; missing={missing} extra={extra}")
        for cat, terms in self.per_category.items():
            if not terms:
                raise EmptyTermList(f"term list for {cat} is empty")
        object.__setattr__(
            self, "per_category", {c: frozenset(self.per_category[c]) for c in CATEGORIES}
        )

    @property
    def all_terms(self) -> frozenset[str]:
        return frozenset().union(*self.per_category.values())

    @classmethod
    def from_mapping(
        cls, mapping: Mapping[str, Iterable[str]], max_terms: int | None = MAX_TERMS
    ) -> "TermLists":
        lists = {c: frozenset(t.strip().lower() for t in terms if t.strip()) for c, terms in mapping.items()}
        if max_terms is not None:
            for cat, terms in lists.items():
                if len(terms) > max_terms:
                    raise ConfigError(f"term list for {cat} has {len(terms)} terms (limit {max_terms})")
        return cls(lists)

    @classmethod
    def from_dir(cls, directory: str | Path, max_terms: int | None = MAX_TERMS) -> "TermLists":
        """Read every ``*.txt`` file whose first line is ``#category: <Name>``."""
        mapping: dict[str, list[str]] = {}
        paths = sorted(Path(directory).glob("*.txt"))
        if not paths:
            raise ConfigError(f"no term-list files in {directory}")
        for path in paths:
            name, terms = read_term_list(path)
            if name in mapping:
                raise ConfigError(f"category {name} defined twice (second in {path})")
            mapping[name] = terms
        return cls.from_mapping(mapping, max_terms)

    def lemmatized(self, rules: LemmaRules) -> "TermLists":
        """Map every term through the lemmatizer so lists match normalized snippets."""
        return TermLists({c: frozenset(rules.lemmatize(t) for t in ts) for c, ts in self.per_category.items()})


def read_term_list(path: str | Path) -> tuple[str, list[str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#category:"):
        raise ParseError(f"{path}: first line must be '#category: <Name>'", 1)
    name = lines[0].split(":", 1)[1].strip()
    terms = [ln.strip() for ln in lines[1:] if ln.strip() and not ln.startswith("#")]
    return name, terms


def default_term_lists() -> TermLists:
    return TermLists.from_dir(data_path("termlists"))


@dataclass(frozen=True)
class ObjFeatures:
    tp: tuple[float, ...]
    tcov: tuple[float, ...]
    mp: float
    mc: float

    def as_vector(self) -> list[float]:
        return [*self.tp, *self.tcov, self.mp, self.mc]

    @classmethod
    def from_vector(cls, values: Sequence[float]) -> "ObjFeatures":
        if len(values) != N_FEATURES:
            raise ValueError(f"expected {N_FEATURES} values, got {len(values)}")
        v = [float(x) for x in values]
        return cls(tuple(v[:7]), tuple(v[7:14]), v[14], v[15])

    def named(self) -> dict[str, float]:
        return dict(zip(FEATURE_NAMES, self.as_vector()))


def term_prevalence(terms: TermSequence, category_list: Iterable[str]) -> float:
    if len(terms) == 0:
        return 0.0
    listed = set(category_list)
    return sum(1 for t in terms.terms if t in listed) / len(terms)


def term_coverage(terms: TermSequence, category_list: Iterable[str]) -> float:
    listed = set(category_list)
    if not listed:
        raise EmptyTermList("term coverage needs a non-empty term list")
    return len(listed & terms.unique_terms) / len(listed)


def misspelling_prevalence(terms: TermSequence, dictionary: SpellDictionary) -> float:
    if len(terms) == 0:
        return 0.0
    return sum(is_misspelled(t, dictionary) for t in terms.terms) / len(terms)


def misspelling_coverage(terms: TermSequence, term_lists: TermLists, dictionary: SpellDictionary) -> float:
    misspelled = [t for t in terms.unique_terms if is_misspelled(t, dictionary)]
    if not misspelled:
        return 0.0
    listed = term_lists.all_terms
    return sum(t in listed for t in misspelled) / len(misspelled)


def features_from_terms(terms: TermSequence, term_lists: TermLists, dictionary: SpellDictionary) -> ObjFeatures:
    lists = [term_lists.per_category[c] for c in CATEGORIES]
    return ObjFeatures(
        tp=tuple(term_prevalence(terms, tl) for tl in lists),
        tcov=tuple(term_coverage(terms, tl) for tl in lists),
        mp=misspelling_prevalence(terms, dictionary),
        mc=misspelling_coverage(terms, term_lists, dictionary),
    )


def extract_obj_features(
    snippet: str,
    term_lists: TermLists,
    stopwords: frozenset[str] | set[str],
    lemma_rules: LemmaRules,
    dictionary: SpellDictionary,
) -> ObjFeatures:
    return features_from_terms(normalize(snippet, stopwords, lemma_rules), term_lists, dictionary)


def read_training_csv(path: str | Path) -> tuple[list[list[float]], list[int]]:
    """Labeled judge data: the 16 feature columns plus ``class`` (bad/ok or 1/0)."""
    X, y = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = [c for c in (*FEATURE_NAMES, "class") if c not in fields]
        if missing:
            raise ParseError(f"{path}: missing columns {missing}", 1)
        for lineno, rec in enumerate(reader, 2):
            try:
                X.append([float(rec[c]) for c in FEATURE_NAMES])
            except ValueError as exc:
                raise ParseError(f"{path}: {exc}", lineno) from exc
            y.append(_parse_class(rec["class"], path, lineno))
    return X, y


def write_training_csv(path: str | Path, X: Sequence[Sequence[float]], y: Sequence[int]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*FEATURE_NAMES, "class"])
        for row, cls in zip(X, y):
            writer.writerow([repr(float(v)) for v in row] + ["bad" if cls else "ok"])


def _parse_class(raw: str, path, lineno: int) -> int:
    value = raw.strip().lower()
    if value in ("bad", "1", "objectionable"):
        return 1
    if value in ("ok", "0", "good"):
        return 0
    raise ParseError(f"{path}: unknown class {raw!r}", lineno)
