"""Application configuration, loaded from a TOML file.

Relative paths resolve against the config file's directory; every referenced
file must exist when the config is loaded. Unknown keys are rejected.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class PathsConfig(_Section):
    term_lists: Optional[Path] = None
    stopwords: Optional[Path] = None
    dictionary: Optional[Path] = None
    lemma_rules: Optional[Path] = None
    lemma_exceptions: Optional[Path] = None
    familiar_vocab: Optional[Path] = None
    judge_model: Optional[Path] = None


class EduConfig(_Section):
    kind: Literal["stub", "lookup", "remote"] = "stub"
    value: float = Field(0.5, ge=0.0, le=1.0)
    lookup_file: Optional[Path] = None
    default: float = Field(0.5, ge=0.0, le=1.0)
    endpoint: Optional[str] = None
    timeout: float = Field(10.0, gt=0)
    retries: int = Field(3, ge=0)
    backoff: float = Field(0.5, ge=0)
    max_in_flight: int = Field(4, ge=1)

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind == "lookup" and self.lookup_file is None:
            raise ValueError("edu.kind = 'lookup' needs edu.lookup_file")
        if self.kind == "remote" and not self.endpoint:
            raise ValueError("edu.kind = 'remote' needs edu.endpoint")
        return self


class MetricsConfig(_Section):
    k: int = Field(10, ge=1)
    gain: Literal["exp", "linear"] = "exp"
    relevant_label: int = Field(2, ge=1, le=2)


class TrainSection(_Section):
    max_rounds: int = Field(500, ge=1)
    tolerance: float = Field(1e-5, ge=0)
    measure: str = "ncs_dcg@10"
    features: Optional[list[str]] = None
    seed: int = 0


class JudgeConfig(_Section):
    n_trees: int = Field(100, ge=1)
    max_depth: int = Field(8, ge=1)
    max_leaf_nodes: int = Field(32, ge=2)
    min_samples_leaf: int = Field(32, ge=1)
    min_samples_split: int = Field(32, ge=2)
    seed: int = 0
    n_jobs: int = Field(1, ge=1)


class MappingConfig(_Section):
    items: str = "items"
    url: str = "link"
    title: str = "title"
    snippet: str = "snippet"
    rank: Optional[str] = None


class SearchConfig(_Section):
    kind: Literal["fixture", "http"] = "fixture"
    fixture_dir: Optional[Path] = None
    endpoint: Optional[str] = None
    api_key_env: Optional[str] = "SEARCH_API_KEY"
    key_param: str = "key"
    query_param: str = "q"
    count_param: Optional[str] = "num"
    extra_params: dict[str, str] = Field(default_factory=dict)
    mapping: MappingConfig = Field(default_factory=MappingConfig)
    max_results: int = Field(20, ge=1)
    rate: float = Field(1.0, gt=0)
    retries: int = Field(3, ge=0)
    backoff: float = Field(1.0, ge=0)
    timeout: float = Field(10.0, gt=0)
    n_jobs: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind == "fixture" and self.fixture_dir is None:
            raise ValueError("search.kind = 'fixture' needs search.fixture_dir")
        if self.kind == "http" and not self.endpoint:
            raise ValueError("search.kind = 'http' needs search.endpoint")
        return self


class RanksetConfig(_Section):
    ideal_corpus: Path
    bad_pool: Path
    seed: int = 0


class AblateConfig(_Section):
    train_ratio: float = Field(0.8, gt=0.0, lt=1.0)
    seed: int = 0


class AppConfig(_Section):
    paths: PathsConfig = Field(default_factory=PathsConfig)
    edu: EduConfig = Field(default_factory=EduConfig)
    metrics: MetricsConfig = Field(default_factory=MetricsConfig)
    train: TrainSection = Field(default_factory=TrainSection)
    judge: JudgeConfig = Field(default_factory=JudgeConfig)
    search: Optional[SearchConfig] = None
    rankset: Optional[RanksetConfig] = None
    ablate: AblateConfig = Field(default_factory=AblateConfig)


def _path_fields(cfg: AppConfig):
    """Yield (section name, field name, section object) for every path-valued field."""
    for name in ("paths", "edu", "search", "rankset"):
        section = getattr(cfg, name)
        if section is None:
            continue
        for field_name, value in section:
            if isinstance(value, Path):
                yield name, field_name, section


def _resolve(cfg: AppConfig, base: Path) -> AppConfig:
    updates: dict[str, dict[str, Path]] = {}
    for sec, fname, section in _path_fields(cfg):
        path = getattr(section, fname)
        if not path.is_absolute():
            path = base / path
        if not path.exists():
            raise ConfigError(f"{sec}.{fname}: file not found: {path}")
        updates.setdefault(sec, {})[fname] = path
    return cfg.model_copy(
        update={sec: getattr(cfg, sec).model_copy(update=vals) for sec, vals in updates.items()}
    )


def load_config(path: str | Path | None) -> AppConfig:
    """Load and validate a config file; ``None`` gives the built-in defaults."""
    if path is None:
        return AppConfig()
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML: {exc}") from exc
    try:
        cfg = AppConfig.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise ConfigError(f"{path}: {where}: {first['msg']} ({exc.error_count()} error(s))") from exc
    return _resolve(cfg, path.parent)
