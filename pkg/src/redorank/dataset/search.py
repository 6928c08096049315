"""Search-engine clients: canned fixtures for offline builds, and a rate-limited HTTP client."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Protocol, Sequence

import httpx

from ..errors import ClientError, ConfigError

logger = logging.getLogger(__name__)

RETRY_STATUS = frozenset({429, 500, 502, 503, 504})


@dataclass(frozen=True)
class SearchResult:
    url: str
    title: str
    snippet: str
    rank: int


class SearchClient(Protocol):
    max_results: int

    def search(self, query: str) -> list[SearchResult]: ...


def fixture_name(query: str) -> str:
    return hashlib.sha1(query.encode("utf-8")).hexdigest()[:16] + ".json"


def write_fixture(directory: str | Path, query: str, results: Sequence[SearchResult]) -> Path:
    path = Path(directory) / fixture_name(query)
    doc = {
        "query": query,
        "results": [{"url": r.url, "title": r.title, "snippet": r.snippet, "rank": r.rank} for r in results],
    }
    path.write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


class FixtureClient:
    """Serves results from ``<directory>/<sha1(query)[:16]>.json``; a missing file is an error."""

    def __init__(self, directory: str | Path, max_results: int = 20):
        self.directory = Path(directory)
        self.max_results = max_results
        if not self.directory.is_dir():
            raise ConfigError(f"fixture directory not found: {self.directory}")

    def search(self, query: str) -> list[SearchResult]:
        path = self.directory / fixture_name(query)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ClientError(f"no fixture for query {query!r} ({path.name})") from exc
        except json.JSONDecodeError as exc:
            raise ClientError(f"fixture {path.name} is not valid JSON: {exc}") from exc
        results = [
            SearchResult(r["url"], r.get("title", ""), r.get("snippet", ""), int(r.get("rank", i)))
            for i, r in enumerate(doc.get("results", []), 1)
        ]
        return results[: self.max_results]


class TokenBucket:
    """Thread-safe token bucket: ``rate`` tokens per second, bursts up to ``capacity``."""

    def __init__(
        self,
        rate: float = 1.0,
        capacity: float = 1.0,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate <= 0 or capacity < 1:
            raise ConfigError("token bucket needs rate > 0 and capacity >= 1")
        self.rate = rate
        self.capacity = capacity
        self._clock = clock
        self._sleep = sleep
        self._tokens = capacity
        self._stamp = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        with self._lock:
            while True:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._stamp) * self.rate)
                self._stamp = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                self._sleep((1.0 - self._tokens) / self.rate)


def _dig(obj: Any, path: str) -> Any:
    for part in path.split(".") if path else []:
        if isinstance(obj, Mapping):
            obj = obj.get(part)
        elif isinstance(obj, list) and part.isdigit() and int(part) < len(obj):
            obj = obj[int(part)]
        else:
            return None
    return obj


@dataclass(frozen=True)
class ResponseMapping:
    """Dotted field paths locating results inside an engine's JSON response."""

    items: str = "items"
    url: str = "link"
    title: str = "title"
    snippet: str = "snippet"
    rank: str | None = None


@dataclass
class HttpClient:
    endpoint: str
    api_key_env: str | None = "SEARCH_API_KEY"
    key_param: str = "key"
    query_param: str = "q"
    count_param: str | None = "num"
    extra_params: dict[str, str] = field(default_factory=dict)
    mapping: ResponseMapping = field(default_factory=ResponseMapping)
    max_results: int = 20
    rate: float = 1.0
    retries: int = 3
    backoff: float = 1.0
    timeout: float = 10.0
    transport: httpx.BaseTransport | None = None
    sleep: Callable[[float], None] = time.sleep

    def __post_init__(self) -> None:
        self._bucket = TokenBucket(self.rate, sleep=self.sleep)
        self._client = httpx.Client(timeout=self.timeout, transport=self.transport)

    def _params(self, query: str) -> dict[str, str]:
        params = dict(self.extra_params)
        params[self.query_param] = query
        if self.count_param:
            params[self.count_param] = str(self.max_results)
        if self.api_key_env:
            key = os.environ.get(self.api_key_env)
            if not key:
                raise ConfigError(f"environment variable {self.api_key_env} holds no API key")
            params[self.key_param] = key
        return params

    def search(self, query: str) -> list[SearchResult]:
        params = self._params(query)
        last_error = "no attempt made"
        for attempt in range(self.retries + 1):
            if attempt:
                self.sleep(self.backoff * 2 ** (attempt - 1))
            self._bucket.acquire()
            try:
                resp = self._client.get(self.endpoint, params=params)
            except httpx.HTTPError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                continue
            if resp.status_code in RETRY_STATUS:
                last_error = f"HTTP {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise ClientError(f"search endpoint returned HTTP {resp.status_code}")
            try:
                return self._parse(resp.json())
            except ValueError as exc:
                raise ClientError(f"search endpoint sent unparseable body: {exc}") from exc
        raise ClientError(f"search endpoint failed after {self.retries + 1} attempts: {last_error}")

    def _parse(self, body: Any) -> list[SearchResult]:
        items = _dig(body, self.mapping.items) or []
        if not isinstance(items, list):
            raise ValueError(f"field {self.mapping.items!r} is not a list")
        out = []
        for i, item in enumerate(items[: self.max_results], 1):
            url = _dig(item, self.mapping.url)
            if not url:
                continue
            rank = _dig(item, self.mapping.rank) if self.mapping.rank else i
            out.append(
                SearchResult(
                    str(url),
                    str(_dig(item, self.mapping.title) or ""),
                    str(_dig(item, self.mapping.snippet) or ""),
                    int(rank),
                )
            )
        return out

    def close(self) -> None:
        self._client.close()
