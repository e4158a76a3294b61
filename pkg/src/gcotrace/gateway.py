"""Chat-completions client with retries and bounded concurrency, plus a local stub server."""
from __future__ import annotations

import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Sequence

import httpx

log = logging.getLogger(__name__)

API_KEY_ENV = "GCOTRACE_API_KEY"
RETRY_STATUS = frozenset({408, 409, 425, 429, 500, 502, 503, 504})


@dataclass(frozen=True)
class ModelConfig:
    base_url: str
    model: str
    api_key: str | None = field(default=None, repr=False)
    temperature: float = 0.1
    max_tokens: int = 4096
    n: int = 1
    timeout: float = 120.0
    max_retries: int = 3
    concurrency: int = 8
    backoff: float = 0.5

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        for name in ("max_tokens", "timeout", "concurrency"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_retries < 0 or self.backoff < 0:
            raise ValueError("retry settings must be non-negative")

    @classmethod
    def with_env_key(cls, **kw) -> "ModelConfig":
        kw.setdefault("api_key", os.environ.get(API_KEY_ENV))
        return cls(**kw)

    def public(self) -> dict:
        """Settings safe to write into manifests (no key)."""
        return {
            "base_url": self.base_url,
            "model": self.model,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "n": self.n,
            "timeout": self.timeout,
            "max_retries": self.max_retries,
            "concurrency": self.concurrency,
        }


@dataclass(frozen=True)
class QueryResult:
    instance_id: str
    candidates: tuple[str, ...] = ()
    latencies: tuple[float, ...] = ()
    error: str | None = None
    attempts: int = 0

    @property
    def ok(self) -> bool:
        return self.error is None


class _Failure(Exception):
    def __init__(self, message: str, retry: bool = True):
        super().__init__(message)
        self.retry = retry


def _endpoint(base_url: str) -> str:
    base = base_url.rstrip("/")
    return base if base.endswith("/chat/completions") else base + "/chat/completions"


def _request_once(client: httpx.Client, prompt: str, cfg: ModelConfig, n: int) -> list[str]:
    headers = {"Content-Type": "application/json"}
    if cfg.api_key:
        headers["Authorization"] = f"Bearer {cfg.api_key}"
    body = {
        "model": cfg.model,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": cfg.temperature,
        "max_tokens": cfg.max_tokens,
        "n": n,
    }
    try:
        resp = client.post(_endpoint(cfg.base_url), json=body, headers=headers, timeout=cfg.timeout)
    except httpx.TimeoutException:
        raise _Failure("request timed out") from None
    except httpx.TransportError as exc:
        raise _Failure(f"transport error: {type(exc).__name__}") from None
    if resp.status_code != 200:
        raise _Failure(f"HTTP {resp.status_code}", retry=resp.status_code in RETRY_STATUS or resp.status_code in (401, 403))
    try:
        choices = resp.json()["choices"]
        return [c["message"]["content"] or "" for c in choices]
    except (ValueError, KeyError, TypeError):
        raise _Failure("malformed response body") from None


def complete(prompt: str, cfg: ModelConfig, instance_id: str = "", client: httpx.Client | None = None,
             sleep: Callable[[float], None] = time.sleep) -> QueryResult:
    """Collect ``cfg.n`` candidates for one prompt.

    The endpoint is asked for all of them at once; if it returns fewer,
    further calls fill the gap.  Failures are retried with exponential
    backoff; once retries run out the result carries an error instead of
    raising.
    """
    own = client is None
    client = client or httpx.Client()
    texts: list[str] = []
    latencies: list[float] = []
    attempts = 0
    failures = 0
    try:
        while len(texts) < cfg.n:
            attempts += 1
            start = time.monotonic()
            try:
                got = _request_once(client, prompt, cfg, cfg.n - len(texts))
            except _Failure as exc:
                failures += 1
                if not exc.retry or failures > cfg.max_retries:
                    log.warning("query %s failed for good after %d attempts: %s", instance_id, attempts, exc)
                    return QueryResult(instance_id, (), (), f"{exc} after {attempts} attempts", attempts)
                delay = cfg.backoff * (2 ** (failures - 1))
                log.info("query %s attempt %d failed (%s); retrying in %.2fs", instance_id, attempts, exc, delay)
                sleep(delay)
                continue
            if not got:
                failures += 1
                if failures > cfg.max_retries:
                    return QueryResult(instance_id, (), (), f"empty response after {attempts} attempts", attempts)
                continue
            took = time.monotonic() - start
            got = got[: cfg.n - len(texts)]
            texts.extend(got)
            latencies.extend([took] * len(got))
    finally:
        if own:
            client.close()
    return QueryResult(instance_id, tuple(texts), tuple(latencies), None, attempts)


def batch_query(items: Sequence[tuple[str, str]], cfg: ModelConfig,
                sleep: Callable[[float], None] = time.sleep) -> list[QueryResult]:
    """Query ``(instance_id, prompt)`` pairs with at most ``cfg.concurrency`` in flight.

    Results come back sorted by instance id; one failing instance never
    affects the others.
    """
    if not items:
        return []
    limits = httpx.Limits(max_connections=cfg.concurrency, max_keepalive_connections=cfg.concurrency)
    with httpx.Client(limits=limits) as client, ThreadPoolExecutor(cfg.concurrency) as pool:
        futures = [pool.submit(complete, prompt, cfg, iid, client, sleep) for iid, prompt in items]
        results = [f.result() for f in futures]
    return sorted(results, key=lambda r: r.instance_id)


# ---------------------------------------------------------------------------
# Stub endpoint

Responder = Callable[[str, int], list[str]]


def echo_responder(prompt: str, n: int) -> list[str]:
    return [prompt] * n


def trace_responder(prompt: str, n: int) -> list[str]:
    """Answer a dataset prompt with the generated trace for its instance."""
    from .dataset import instance_from_input, task_descriptions
    from .graph import TaskKind
    from .thoughts import generate_trace, render_trace

    for name, text in task_descriptions().items():
        if prompt.startswith(text):
            inst = instance_from_input(prompt, TaskKind.parse(name))
            return [render_trace(generate_trace(inst))] * n
    return ["I do not recognise this task."] * n


class StubServer:
    """A local chat-completions endpoint for tests and offline runs.

    ``fail`` maps a prompt to an HTTP status to return instead of an answer
    (or ``None`` to answer normally).  ``delay`` holds every request open for
    a while so that concurrency limits can be observed through
    ``max_in_flight``.
    """

    def __init__(self, responder: Responder = trace_responder, fail: Callable[[str], int | None] | None = None,
                 delay: float = 0.0, host: str = "127.0.0.1", port: int = 0):
        self.responder = responder
        self.fail = fail
        self.delay = delay
        self.requests = 0
        self.in_flight = 0
        self.max_in_flight = 0
        self._lock = threading.Lock()
        self._server = ThreadingHTTPServer((host, port), self._handler())
        self._server.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/v1"

    def _handler(self):
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output quiet
                pass

            def do_POST(self):
                with stub._lock:
                    stub.requests += 1
                    stub.in_flight += 1
                    stub.max_in_flight = max(stub.max_in_flight, stub.in_flight)
                try:
                    self._answer()
                finally:
                    with stub._lock:
                        stub.in_flight -= 1

            def _answer(self):
                length = int(self.headers.get("Content-Length", 0))
                try:
                    body = json.loads(self.rfile.read(length))
                    prompt = body["messages"][-1]["content"]
                    n = int(body.get("n", 1))
                except (ValueError, KeyError, IndexError, TypeError):
                    self._send(400, {"error": "bad request"})
                    return
                if stub.delay:
                    time.sleep(stub.delay)
                status = stub.fail(prompt) if stub.fail else None
                if status:
                    self._send(status, {"error": "injected failure"})
                    return
                texts = stub.responder(prompt, n)
                choices = [
                    {"index": i, "message": {"role": "assistant", "content": t}, "finish_reason": "stop"}
                    for i, t in enumerate(texts)
                ]
                self._send(200, {"object": "chat.completion", "model": body.get("model"), "choices": choices})

            def _send(self, status, payload):
                data = json.dumps(payload).encode()
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

        return Handler

    def start(self) -> "StubServer":
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self) -> "StubServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
