"""HTTP transport layer with record/replay support.

Every outbound request in this package goes through a Transport object, so
the whole test suite and the bundled demo jobs run offline against committed
fixtures. Fixture files are JSON lists of entries in the documented schema:

    [{"method": "GET", "url": "https://host/path?a=1", "status": 200, "body": ...}, ...]

``body`` holds the decoded JSON payload (or a plain string for non-JSON
responses). Requests are matched on (method, url) after normalizing the query
string to sorted key order, so the order a client appends parameters in does
not matter.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any
from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit

import requests

from .errors import AuthError, FixtureMiss, TransportError, TransportTimeout

log = logging.getLogger(__name__)


@dataclass
class TransportResponse:
    status: int
    body: Any  # decoded JSON (dict/list) or raw text


def canonical_url(url: str, params: dict | None = None) -> str:
    """Merge query parameters into the URL and sort them for stable matching."""
    parts = urlsplit(url)
    pairs = parse_qsl(parts.query, keep_blank_values=True)
    if params:
        pairs.extend((k, str(v)) for k, v in params.items() if v is not None)
    pairs.sort()
    query = urlencode(pairs)
    return urlunsplit((parts.scheme.lower(), parts.netloc.lower(), parts.path, query, ""))


class Transport:
    """Interface: subclasses implement request()."""

    def request(
        self,
        method: str,
        url: str,
        params: dict | None = None,
        headers: dict | None = None,
        data: dict | None = None,
        timeout: float | None = None,
    ) -> TransportResponse:
        raise NotImplementedError


class HttpTransport(Transport):
    """Live transport over requests.Session."""

    def __init__(self, default_timeout: float = 30.0):
        self._session = requests.Session()
        self._default_timeout = default_timeout

    def request(self, method, url, params=None, headers=None, data=None, timeout=None):
        try:
            resp = self._session.request(
                method,
                url,
                params=params,
                headers=headers,
                data=data,
                timeout=timeout if timeout is not None else self._default_timeout,
            )
        except requests.Timeout as exc:
            raise TransportTimeout(f"{method} {url}: {exc}") from exc
        except requests.RequestException as exc:
            raise TransportError(f"{method} {url}: {exc}") from exc
        try:
            body = resp.json()
        except ValueError:
            body = resp.text
        return TransportResponse(status=resp.status_code, body=body)


class ReplayTransport(Transport):
    """Serves canned responses from a fixture file or an in-memory entry list."""

    def __init__(self, source: str | Path | list[dict]):
        if isinstance(source, (str, Path)):
            with open(source, encoding="utf-8") as fh:
                entries = json.load(fh)
        else:
            entries = source
        self._responses: dict[tuple[str, str], TransportResponse] = {}
        for entry in entries:
            key = (entry["method"].upper(), canonical_url(entry["url"]))
            self._responses[key] = TransportResponse(entry["status"], entry["body"])

    def request(self, method, url, params=None, headers=None, data=None, timeout=None):
        key = (method.upper(), canonical_url(url, params))
        try:
            return self._responses[key]
        except KeyError:
            raise FixtureMiss(f"no fixture for {key[0]} {key[1]}") from None


class RecordingTransport(Transport):
    """Wraps another transport and captures request/response pairs."""

    def __init__(self, inner: Transport):
        self._inner = inner
        self.entries: list[dict] = []

    def request(self, method, url, params=None, headers=None, data=None, timeout=None):
        resp = self._inner.request(method, url, params=params, headers=headers, data=data, timeout=timeout)
        self.entries.append(
            {
                "method": method.upper(),
                "url": canonical_url(url, params),
                "status": resp.status,
                "body": resp.body,
            }
        )
        return resp

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.entries, indent=1, sort_keys=True), encoding="utf-8")


@dataclass
class CountingTransport(Transport):
    """Wraps a transport and counts calls; used by tests and progress estimates."""

    inner: Transport
    calls: int = 0
    log: list[tuple[str, str]] = field(default_factory=list)

    def request(self, method, url, params=None, headers=None, data=None, timeout=None):
        self.calls += 1
        self.log.append((method.upper(), canonical_url(url, params)))
        return self.inner.request(method, url, params=params, headers=headers, data=data, timeout=timeout)


def raise_for_status(resp: TransportResponse, context: str) -> None:
    """Map generic HTTP status classes onto package errors."""
    if resp.status in (401, 403):
        raise AuthError(f"{context}: HTTP {resp.status}")
    if resp.status >= 500:
        raise TransportError(f"{context}: HTTP {resp.status}")
