"""Educational-alignment scorers.

The alignment model itself lives outside this package; scores reach the
pipeline through one of three interchangeable sources, all of which return
values in [0, 1] or raise.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import httpx

from ..errors import ConfigError, MalformedScore, ParseError, ServiceUnavailable
from ..model import Resource

logger = logging.getLogger(__name__)

RETRY_STATUS = frozenset({429, 500, 502, 503, 504})


def check_score(value, where: str = "") -> float:
    try:
        score = float(value)
    except (TypeError, ValueError) as exc:
        raise MalformedScore(f"non-numeric educational score {value!r} {where}".rstrip()) from exc
    if math.isnan(score) or not 0.0 <= score <= 1.0:
        raise MalformedScore(f"educational score {score} outside [0, 1] {where}".rstrip())
    return score


class EduScorer(Protocol):
    def score(self, resource: Resource) -> float: ...

    def score_many(self, resources: Sequence[Resource]) -> list[float]: ...


class ConstantStub:
    def __init__(self, value: float = 0.5):
        self.value = check_score(value)

    def score(self, resource: Resource) -> float:
        return self.value

    def score_many(self, resources: Sequence[Resource]) -> list[float]:
        return [self.value] * len(resources)


class LookupTable:
    """Precomputed scores keyed by doc_id (or URL); misses get ``default``."""

    def __init__(self, scores: Mapping[str, float], default: float = 0.5):
        self.scores = {k: check_score(v, f"for {k}") for k, v in scores.items()}
        self.default = check_score(default)

    @classmethod
    def from_csv(cls, path: str | Path, default: float = 0.5) -> "LookupTable":
        scores: dict[str, float] = {}
        try:
            fh = open(path, newline="", encoding="utf-8")
        except FileNotFoundError as exc:
            raise ConfigError(f"score file not found: {path}") from exc
        with fh:
            reader = csv.reader(fh)
            for lineno, row in enumerate(reader, 1):
                if not row or (lineno == 1 and row[:2] == ["doc_id", "score"]):
                    continue
                if len(row) != 2:
                    raise ParseError(f"{path}: expected 'doc_id,score'", lineno)
                try:
                    scores[row[0]] = check_score(row[1], f"for {row[0]}")
                except MalformedScore as exc:
                    raise ParseError(f"{path}: {exc}", lineno) from exc
        return cls(scores, default)

    def score(self, resource: Resource) -> float:
        for key in (resource.doc_id, resource.url):
            if key in self.scores:
                return self.scores[key]
        return self.default

    def score_many(self, resources: Sequence[Resource]) -> list[float]:
        return [self.score(r) for r in resources]


class RemoteService:
    """HTTP scorer: POST ``{"url", "snippet"}`` and read ``{"score"}`` back.

    Connection failures, timeouts, 429 and 5xx responses are retried with
    exponential backoff; ``score_many`` keeps at most ``max_in_flight``
    requests open and returns scores in input order.
    """

    def __init__(
        self,
        endpoint: str,
        timeout: float = 10.0,
        retries: int = 3,
        backoff: float = 0.5,
        max_in_flight: int = 4,
        transport: httpx.BaseTransport | None = None,
    ):
        if max_in_flight < 1:
            raise ConfigError("max_in_flight must be >= 1")
        self.endpoint = endpoint
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.max_in_flight = max_in_flight
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "RemoteService":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def score(self, resource: Resource) -> float:
        payload = {"url": resource.url, "snippet": resource.snippet}
        last_error = "no attempt made"
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self._client.post(self.endpoint, json=payload)
            except httpx.HTTPError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                logger.debug("edu scorer attempt %d failed: %s", attempt + 1, last_error)
                continue
            if resp.status_code in RETRY_STATUS:
                last_error = f"HTTP {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise ServiceUnavailable(f"edu scorer returned HTTP {resp.status_code} for {resource.url}")
            try:
                body = resp.json()
            except ValueError as exc:
                raise MalformedScore(f"edu scorer sent non-JSON body for {resource.url}") from exc
            if not isinstance(body, dict) or "score" not in body:
                raise MalformedScore(f"edu scorer response lacks 'score' for {resource.url}")
            return check_score(body["score"], f"for {resource.url}")
        raise ServiceUnavailable(
            f"edu scorer {self.endpoint} failed after {self.retries + 1} attempts: {last_error}"
        )

    def score_many(self, resources: Sequence[Resource]) -> list[float]:
        if self.max_in_flight == 1 or len(resources) <= 1:
            return [self.score(r) for r in resources]
        with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
            return list(pool.map(self.score, resources))


def s_edu(resource: Resource, scorer: EduScorer) -> float:
    return check_score(scorer.score(resource), f"for {resource.doc_id}")
