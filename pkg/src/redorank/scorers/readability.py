"""Snippet readability as a grade level, using a revised-Spache style formula.

    grade = coeff_asl * ASL + coeff_pdw * PDW% + intercept

ASL is words per sentence and PDW% the percentage of words missing from the
familiar vocabulary. A word counts as familiar when its lowercase form or its
lemma is listed, and numbers are always familiar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from ..errors import ConfigError, EmptyText
from ..textproc import LemmaRules, data_path, default_lemma_rules, read_lines, tokenize

_SENTENCE_END = re.compile(r"[.!?]+(?=\s|$)")


@dataclass(frozen=True)
class ReadabilityConfig:
    familiar_vocab: frozenset[str]
    coeff_asl: float = 0.121
    coeff_pdw: float = 0.082
    intercept: float = 0.659
    clamp: tuple[float, float] = (0.0, 13.0)
    lemma_rules: LemmaRules | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.familiar_vocab:
            raise ConfigError("familiar vocabulary is empty")
        if not self.clamp[0] < self.clamp[1]:
            raise ConfigError(f"clamp bounds {self.clamp} are not increasing")

    @classmethod
    def from_file(cls, path: str | Path, **kwargs) -> "ReadabilityConfig":
        vocab = frozenset(w.strip().lower() for w in read_lines(path))
        return cls(familiar_vocab=vocab, **kwargs)

    def is_familiar(self, word: str) -> bool:
        if word.isnumeric() or word in self.familiar_vocab:
            return True
        return self.lemma_rules is not None and self.lemma_rules.lemmatize(word) in self.familiar_vocab


@lru_cache(maxsize=None)
def default_readability_config() -> ReadabilityConfig:
    return ReadabilityConfig.from_file(data_path("familiar_words.txt"), lemma_rules=default_lemma_rules())


def split_sentences(text: str) -> list[str]:
    """Split after runs of . ! ? that precede whitespace or the end; fragments are one sentence."""
    parts, start = [], 0
    for m in _SENTENCE_END.finditer(text):
        parts.append(text[start : m.end()])
        start = m.end()
    parts.append(text[start:])
    return [p for p in parts if tokenize(p)]


@dataclass(frozen=True)
class TextStats:
    words: int
    sentences: int
    unfamiliar: int

    @property
    def asl(self) -> float:
        return self.words / self.sentences

    @property
    def pdw(self) -> float:
        return 100.0 * self.unfamiliar / self.words


def text_stats(text: str, config: ReadabilityConfig) -> TextStats:
    sentences = split_sentences(text)
    words = [w for s in sentences for w in tokenize(s)]
    if not words:
        raise EmptyText("text has no words")
    unfamiliar = sum(not config.is_familiar(w) for w in words)
    return TextStats(len(words), len(sentences), unfamiliar)


def grade_from_stats(asl: float, pdw: float, config: ReadabilityConfig) -> float:
    lo, hi = config.clamp
    raw = config.coeff_asl * asl + config.coeff_pdw * pdw + config.intercept
    return min(max(raw, lo), hi)


def s_read(snippet: str, config: ReadabilityConfig | None = None) -> float:
    config = config or default_readability_config()
    stats = text_stats(snippet, config)
    return grade_from_stats(stats.asl, stats.pdw, config)
