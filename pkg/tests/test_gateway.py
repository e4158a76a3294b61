import logging
import threading

import pytest

from gcotrace.gateway import ModelConfig, QueryResult, StubServer, batch_query, complete, echo_responder


def cfg_for(url, **kw):
    kw.setdefault("backoff", 0.0)
    return ModelConfig(base_url=url, model="stub", **kw)


def numbered(prompt, n):
    return [f"{prompt}#{i}" for i in range(n)]


def test_config_invariants():
    with pytest.raises(ValueError):
        ModelConfig("http://x", "m", temperature=-0.1)
    with pytest.raises(ValueError):
        ModelConfig("http://x", "m", n=0)
    with pytest.raises(ValueError):
        ModelConfig("http://x", "m", concurrency=0)
    cfg = ModelConfig("http://x", "m", api_key="sk-secret")
    assert "sk-secret" not in repr(cfg)
    assert "api_key" not in cfg.public()
    assert cfg.temperature == 0.1


def test_key_from_environment(monkeypatch):
    monkeypatch.setenv("GCOTRACE_API_KEY", "from-env")
    assert ModelConfig.with_env_key(base_url="http://x", model="m").api_key == "from-env"


def test_single_candidate():
    with StubServer(echo_responder) as stub:
        res = complete("hello", cfg_for(stub.url))
    assert res.ok and res.candidates == ("hello",) and len(res.latencies) == 1


def test_many_candidates_in_order():
    with StubServer(numbered) as stub:
        res = complete("p", cfg_for(stub.url, n=16, temperature=1.0))
    assert res.candidates == tuple(f"p#{i}" for i in range(16))
    assert stub.requests == 1


def test_endpoint_ignoring_n_is_topped_up():
    with StubServer(lambda p, n: [p]) as stub:
        res = complete("p", cfg_for(stub.url, n=3))
    assert res.ok and len(res.candidates) == 3 and stub.requests == 3


def test_unreachable_endpoint_gives_terminal_error():
    res = complete("p", cfg_for("http://127.0.0.1:1", max_retries=2, timeout=1.0), instance_id="x")
    assert not res.ok and res.candidates == () and res.attempts == 3
    assert "after 3 attempts" in res.error


def test_transient_failures_are_retried(caplog):
    calls = {"n": 0}
    lock = threading.Lock()

    def flaky(prompt):
        with lock:
            calls["n"] += 1
            return 503 if calls["n"] <= 2 else None

    slept = []
    with StubServer(echo_responder, fail=flaky) as stub, caplog.at_level(logging.INFO, "gcotrace.gateway"):
        cfg = cfg_for(stub.url, max_retries=3, backoff=0.5, api_key="sk-very-secret")
        res = complete("p", cfg, "i1", sleep=slept.append)
    assert res.ok and res.attempts == 3
    assert slept == [0.5, 1.0]
    assert sum("retrying" in m for m in caplog.messages) == 2
    assert "sk-very-secret" not in caplog.text


def test_client_errors_are_not_retried():
    with StubServer(echo_responder, fail=lambda p: 400) as stub:
        res = complete("p", cfg_for(stub.url, max_retries=5))
    assert not res.ok and res.attempts == 1 and stub.requests == 1


def test_timeout_is_terminal():
    with StubServer(echo_responder, delay=0.5) as stub:
        res = complete("p", cfg_for(stub.url, timeout=0.1, max_retries=1))
    assert not res.ok and "timed out" in res.error


def test_batch_bounded_and_ordered():
    items = [(f"id-{i:03d}", f"prompt {i}") for i in range(100)]
    items.reverse()
    with StubServer(echo_responder, delay=0.02) as stub:
        results = batch_query(items, cfg_for(stub.url, concurrency=8))
    assert 1 < stub.max_in_flight <= 8
    assert [r.instance_id for r in results] == sorted(i for i, _ in items)
    assert all(r.ok for r in results)
    assert results[5].candidates == ("prompt 5",)


def test_batch_isolates_failures():
    items = [(f"id-{i}", f"prompt {i}") for i in range(10)]
    with StubServer(echo_responder, fail=lambda p: 500 if p == "prompt 4" else None) as stub:
        results = batch_query(items, cfg_for(stub.url, max_retries=1, concurrency=3))
    assert sum(r.ok for r in results) == 9
    (bad,) = [r for r in results if not r.ok]
    assert bad.instance_id == "id-4" and "HTTP 500" in bad.error


def test_empty_batch():
    assert batch_query([], cfg_for("http://127.0.0.1:1")) == []


def test_result_invariant():
    ok = QueryResult("a", ("x",), (0.1,))
    assert ok.ok
    assert not QueryResult("a", error="boom").ok
