from .io import (
    dumps_dataset,
    dumps_features,
    loads_dataset,
    loads_features,
    read_dataset,
    read_features,
    write_dataset,
    write_features,
)
from .rankset import BadRecord, IdealRecord, RanksetSpec, build_rankset, read_bad_pool, read_ideal_corpus
from .search import FixtureClient, HttpClient, ResponseMapping, SearchResult, TokenBucket, write_fixture

__all__ = [
    "BadRecord",
    "FixtureClient",
    "HttpClient",
    "IdealRecord",
    "RanksetSpec",
    "ResponseMapping",
    "SearchResult",
    "TokenBucket",
    "build_rankset",
    "dumps_dataset",
    "dumps_features",
    "loads_dataset",
    "loads_features",
    "read_bad_pool",
    "read_dataset",
    "read_features",
    "read_ideal_corpus",
    "write_dataset",
    "write_features",
    "write_fixture",
]
