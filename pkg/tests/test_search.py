from __future__ import annotations

import httpx
import pytest

from redorank.dataset import HttpClient, ResponseMapping, TokenBucket
from redorank.errors import ClientError, ConfigError


class FakeClock:
    def __init__(self):
        self.now = 0.0
        self.sleeps = []

    def __call__(self):
        return self.now

    def sleep(self, s):
        self.sleeps.append(s)
        self.now += s


def test_token_bucket_paces_requests():
    clock = FakeClock()
    bucket = TokenBucket(rate=2.0, capacity=1, clock=clock, sleep=clock.sleep)
    for _ in range(5):
        bucket.acquire()
    assert clock.now == pytest.approx(2.0)
    with pytest.raises(ConfigError):
        TokenBucket(rate=0)


def client(handler, monkeypatch, **kw):
    monkeypatch.setenv("TEST_SEARCH_KEY", "secret")
    clock = FakeClock()
    c = HttpClient(
        "http://search.test/api", api_key_env="TEST_SEARCH_KEY", transport=httpx.MockTransport(handler),
        sleep=clock.sleep, rate=1000.0, **kw,
    )
    return c, clock


def test_http_search_and_mapping(monkeypatch):
    seen = []

    def handler(request):
        seen.append(request.url)
        return httpx.Response(200, json={"data": {"hits": [
            {"u": "http://a", "t": "A", "s": "sa", "pos": 4},
            {"t": "no url"},
            {"u": "http://b", "t": "B", "s": "sb", "pos": 5},
        ]}})

    mapping = ResponseMapping(items="data.hits", url="u", title="t", snippet="s", rank="pos")
    c, _ = client(handler, monkeypatch, mapping=mapping, extra_params={"cx": "abc"})
    res = c.search("plants")
    assert [(r.url, r.rank) for r in res] == [("http://a", 4), ("http://b", 5)]
    params = dict(seen[0].params)
    assert params == {"cx": "abc", "q": "plants", "num": "20", "key": "secret"}


def test_http_retries_with_backoff(monkeypatch):
    calls = []

    def handler(request):
        calls.append(1)
        if len(calls) < 3:
            return httpx.Response(429)
        return httpx.Response(200, json={"items": [{"link": "http://a", "title": "A", "snippet": "s"}]})

    c, clock = client(handler, monkeypatch, retries=3, backoff=1.0)
    assert [r.rank for r in c.search("x")] == [1]
    assert [s for s in clock.sleeps if s >= 1.0] == [1.0, 2.0]


def test_http_unreachable(monkeypatch):
    def handler(request):
        raise httpx.ConnectError("down", request=request)

    c, _ = client(handler, monkeypatch, retries=2)
    with pytest.raises(ClientError):
        c.search("x")
    c2, _ = client(lambda r: httpx.Response(403), monkeypatch)
    with pytest.raises(ClientError):
        c2.search("x")


def test_missing_api_key(monkeypatch):
    monkeypatch.delenv("NO_SUCH_KEY", raising=False)
    c = HttpClient("http://s", api_key_env="NO_SUCH_KEY", transport=httpx.MockTransport(lambda r: httpx.Response(200)))
    with pytest.raises(ConfigError):
        c.search("x")
