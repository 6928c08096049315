"""Deterministic text normalization shared by the objectionability and readability code.

Pipeline: Unicode-aware tokenization on non-alphanumeric boundaries, lowercasing,
stop-word removal, rule-based lemmatization, and a second stop-word pass (a lemma
can itself be a stop word). The output is a fixpoint: normalizing the joined
terms again yields the same terms.
"""

from __future__ import annotations

import gzip
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import ConfigError

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)
_VOWELS = frozenset("aeiouy")
_NO_UNDOUBLE = frozenset("aeiouylsfzwx")
_MAX_PASSES = 6


def data_path(name: str) -> Path:
    """Location of a file shipped in ``redorank/data``."""
    return Path(str(resources.files("redorank") / "data" / name))


def read_lines(path: str | Path) -> list[str]:
    """Non-empty, non-comment lines of a UTF-8 text file (``.gz`` is transparent)."""
    path = Path(path)
    try:
        if path.suffix == ".gz":
            with gzip.open(path, "rt", encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError(f"file not found: {path}") from exc
    out = []
    for line in text.splitlines():
        line = line.rstrip("\r\n")
        if line.strip() and not line.startswith("#"):
            out.append(line)
    return out


def tokenize(text: str) -> list[str]:
    """Lowercased alphanumeric runs. Hyphens, apostrophes and underscores split tokens.

    Lowercasing comes first: some capitals lower to several code points
    (``İ`` -> ``i`` + combining dot), and the split must see the final form.
    """
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class TermSequence:
    terms: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def unique_terms(self) -> frozenset[str]:
        return frozenset(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def count(self, term: str) -> int:
        return self.terms.count(term)


@dataclass(frozen=True)
class SpellDictionary:
    words: frozenset[str]
    source: str = "<memory>"

    def __post_init__(self) -> None:
        if not self.words:
            raise ConfigError(f"spelling dictionary {self.source} is empty")

    @classmethod
    def from_words(cls, words: Iterable[str], source: str = "<memory>") -> "SpellDictionary":
        return cls(frozenset(w.strip().lower() for w in words if w.strip()), source)

    @classmethod
    def from_file(cls, path: str | Path) -> "SpellDictionary":
        return cls.from_words(read_lines(path), str(path))

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.words


def is_misspelled(term: str, dictionary: SpellDictionary) -> bool:
    """Out-of-dictionary check. Numbers and single characters are never misspellings."""
    if len(term) <= 1 or term.isnumeric():
        return False
    return term not in dictionary


@dataclass(frozen=True)
class SuffixRule:
    suffix: str
    replacement: str
    min_stem: int
    lexical: bool = False
    cvc: bool = False
    undouble: bool = False

    def candidate(self, word: str) -> str | None:
        if not word.endswith(self.suffix):
            return None
        stem = word[: len(word) - len(self.suffix)]
        if len(stem) < self.min_stem:
            return None
        if self.undouble:
            if len(stem) < 2 or stem[-1] != stem[-2] or stem[-1] in _NO_UNDOUBLE:
                return None
            stem = stem[:-1]
        if self.cvc and not _ends_cvc(stem):
            return None
        out = stem + self.replacement
        if not _VOWELS.intersection(out):
            return None
        return out


def _ends_cvc(stem: str) -> bool:
    if len(stem) < 2:
        return False
    c, v = stem[-1], stem[-2]
    if c in _VOWELS or c in "wx" or v not in _VOWELS:
        return False
    return len(stem) == 2 or stem[-3] not in _VOWELS


@dataclass(frozen=True)
class LemmaRules:
    """Ordered suffix rules plus an exception table, optionally checked against a lexicon.

    With a lexicon a rule fires only when its output is a known word, so lemmas
    are either dictionary words or the untouched surface form.
    """

    rules: tuple[SuffixRule, ...]
    exceptions: dict[str, str] = field(default_factory=dict)
    lexicon: SpellDictionary | None = None

    @classmethod
    def from_files(
        cls,
        rules_path: str | Path,
        exceptions_path: str | Path | None = None,
        lexicon: SpellDictionary | None = None,
    ) -> "LemmaRules":
        rules = []
        for n, line in enumerate(read_lines(rules_path), 1):
            cols = line.split("\t")
            if len(cols) < 3:
                raise ConfigError(f"{rules_path}: rule {n} needs suffix, replacement, min_stem")
            flags = set(cols[3].split(",")) if len(cols) > 3 and cols[3] else set()
            unknown = flags - {"lexical", "cvc", "undouble"}
            if unknown:
                raise ConfigError(f"{rules_path}: rule {n} has unknown flags {sorted(unknown)}")
            rules.append(
                SuffixRule(
                    suffix=cols[0],
                    replacement="" if cols[1] == "-" else cols[1],
                    min_stem=int(cols[2]),
                    lexical="lexical" in flags,
                    cvc="cvc" in flags,
                    undouble="undouble" in flags,
                )
            )
        exceptions = {}
        if exceptions_path is not None:
            for line in read_lines(exceptions_path):
                surface, _, lemma = line.partition("\t")
                if not lemma:
                    raise ConfigError(f"{exceptions_path}: expected 'surface<TAB>lemma', got {line!r}")
                exceptions[surface.strip().lower()] = lemma.strip().lower()
        return cls(tuple(rules), exceptions, lexicon)

    def _step(self, word: str) -> str | None:
        for rule in self.rules:
            if self.lexicon is None and rule.lexical:
                continue
            cand = rule.candidate(word)
            if cand is None:
                continue
            if cand == word:
                return word
            if self.lexicon is None or cand in self.lexicon:
                return cand
        return None

    def lemmatize(self, word: str) -> str:
        if word in self.exceptions:
            return self.exceptions[word]
        if not word.isalpha():
            return word
        for _ in range(_MAX_PASSES):
            nxt = self._step(word)
            if nxt is None or nxt == word:
                break
            word = nxt
            if word in self.exceptions:
                return self.exceptions[word]
        return word


def normalize(text: str, stopwords: frozenset[str] | set[str], lemma_rules: LemmaRules) -> TermSequence:
    terms = []
    for tok in tokenize(text):
        if tok in stopwords:
            continue
        lemma = lemma_rules.lemmatize(tok)
        if lemma and lemma not in stopwords:
            terms.append(lemma)
    return TermSequence(tuple(terms))


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    return frozenset(w.strip().lower() for w in read_lines(path or data_path("stopwords.txt")))


@lru_cache(maxsize=None)
def default_dictionary() -> SpellDictionary:
    return SpellDictionary.from_file(data_path("en_words.txt.gz"))


@lru_cache(maxsize=None)
def default_lemma_rules() -> LemmaRules:
    return LemmaRules.from_files(
        data_path("lemma_rules.tsv"), data_path("lemma_exceptions.tsv"), default_dictionary()
    )


@dataclass(frozen=True)
class TextConfig:
    """Bundle of the normalization resources, so callers pass one object around."""

    stopwords: frozenset[str]
    lemma_rules: LemmaRules
    dictionary: SpellDictionary

    def normalize(self, text: str) -> TermSequence:
        return normalize(text, self.stopwords, self.lemma_rules)


@lru_cache(maxsize=None)
def default_text_config() -> TextConfig:
    return TextConfig(load_stopwords(), default_lemma_rules(), default_dictionary())
