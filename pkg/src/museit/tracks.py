"""Spotify metadata resolution with per-URL timeouts and an on-disk cache.

Each link gets a wall-clock budget (default 300 s). Collections are fetched
100 tracks per page and, when the budget runs out mid-collection, whatever
complete pages were retrieved are returned (and cached) marked truncated;
the job then moves on to the next URL. Resolution never raises: every
outcome is encoded in the ResolutionResult status.

The cache holds one CSV per URI under
"<root>/Spotify metadata/{tracks|albums|playlists}/<URI>.csv". Filenames use
the URI verbatim; on filesystems that reject ':' in names (Windows) colons
are swapped for '_', which is reversible because the ids themselves are
base-62. A cache hit costs zero network calls. Truncated entries are
re-resolved unless cache.accept_truncated is set.

Genres live on artist records upstream, so after the track list is known the
resolver batch-fetches artists (50 per call) inside the remaining budget and
stores the sorted union per track; if the budget is gone, genres stay empty
rather than failing the resolution.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import AuthError, CorruptCacheFile, TransportError, TransportTimeout
from .links import SpotifyLink
from .transport import HttpTransport, Transport

log = logging.getLogger(__name__)

API_BASE = "https://api.spotify.com"
TOKEN_URL = "https://accounts.spotify.com/api/token"

TRACKS_PER_PAGE = 100
ARTISTS_PER_CALL = 50
DEFAULT_TIMEOUT_S = 300

_KIND_FOLDERS = {"track": "tracks", "album": "albums", "playlist": "playlists"}


@dataclass
class TrackMetadata:
    track_name: str
    artist_names: list[str]
    album_name: str
    genres: list[str]
    release_date: str  # YYYY or YYYY-MM-DD
    year: int
    duration_ms: int
    explicit: bool
    popularity: int
    uri: str
    publisher: str | None = None
    copyright_text: str | None = None
    lyrics: str | None = None


@dataclass
class CollectionMetadata:
    kind: str  # album | playlist
    name: str
    uri: str
    tracks: list[TrackMetadata]
    truncated: bool = False


@dataclass
class ResolutionResult:
    uri: str
    status: str  # ok | timed_out | not_found | error
    payload: TrackMetadata | CollectionMetadata | None = None
    elapsed_ms: int = 0
    from_cache: bool = False
    message: str | None = None


class LyricsProvider:
    """Interface for optional lyrics lookup; the default returns nothing."""

    def lyrics_for(self, track_name: str, artist_names: list[str]) -> str | None:
        return None


class _DeadlineHit(Exception):
    pass


def cache_path(root: str | Path, uri: str) -> Path:
    kind = uri.split(":")[1]
    name = uri if os.name != "nt" else uri.replace(":", "_")
    return Path(root) / "Spotify metadata" / _KIND_FOLDERS[kind] / f"{name}.csv"


class SpotifyClient:
    """Thin authenticated wrapper over the platform's web API."""

    def __init__(
        self,
        transport: Transport | None = None,
        client_id: str | None = None,
        client_secret: str | None = None,
        clock=time.monotonic,
    ):
        self.transport = transport if transport is not None else HttpTransport()
        self._client_id = client_id if client_id is not None else os.environ.get("SPOTIFY_CLIENT_ID")
        self._client_secret = (
            client_secret if client_secret is not None else os.environ.get("SPOTIFY_CLIENT_SECRET")
        )
        self._clock = clock
        self._token: str | None = None
        self._token_lock = threading.Lock()

    def _headers(self) -> dict:
        if not (self._client_id and self._client_secret):
            return {}
        with self._token_lock:
            if self._token is None:
                import base64

                basic = base64.b64encode(
                    f"{self._client_id}:{self._client_secret}".encode()
                ).decode()
                resp = self.transport.request(
                    "POST",
                    TOKEN_URL,
                    headers={"Authorization": f"Basic {basic}"},
                    data={"grant_type": "client_credentials"},
                )
                if resp.status != 200 or not isinstance(resp.body, dict):
                    raise AuthError(f"token request failed: HTTP {resp.status}")
                self._token = resp.body.get("access_token")
                if not self._token:
                    raise AuthError("token response carried no access_token")
            return {"Authorization": f"Bearer {self._token}"}

    def get(self, path: str, params: dict | None, deadline: float) -> dict:
        remaining = deadline - self._clock()
        if remaining <= 0:
            raise _DeadlineHit()
        resp = self.transport.request(
            "GET", API_BASE + path, params=params, headers=self._headers(), timeout=remaining
        )
        if resp.status == 404:
            raise LookupError(path)
        if resp.status in (401, 403):
            raise AuthError(f"{path}: HTTP {resp.status}")
        if resp.status != 200:
            raise TransportError(f"{path}: HTTP {resp.status}")
        return resp.body


def _year_of(release_date: str) -> int:
    try:
        return int(str(release_date)[:4])
    except (ValueError, TypeError):
        return 0


def _copyright_of(album_obj: dict) -> str | None:
    texts = [c.get("text", "") for c in album_obj.get("copyrights", []) if c.get("text")]
    return " / ".join(texts) if texts else None


def _track_from_obj(obj: dict, album_obj: dict | None = None) -> tuple[TrackMetadata, list[str]]:
    """Parse a track object; returns the track plus its artist ids (for genres)."""
    album = album_obj if album_obj is not None else obj.get("album", {}) or {}
    release = str(album.get("release_date", "") or "")
    track = TrackMetadata(
        track_name=obj.get("name", ""),
        artist_names=[a.get("name", "") for a in obj.get("artists", [])],
        album_name=album.get("name", ""),
        genres=[],
        release_date=release,
        year=_year_of(release),
        duration_ms=int(obj.get("duration_ms", 0) or 0),
        explicit=bool(obj.get("explicit", False)),
        popularity=int(obj.get("popularity", 0) or 0),
        uri=obj.get("uri", ""),
        publisher=album.get("label") or None,
        copyright_text=_copyright_of(album),
    )
    artist_ids = [a.get("id", "") for a in obj.get("artists", []) if a.get("id")]
    return track, artist_ids


class TrackResolver:
    """Resolves SpotifyLinks to metadata, caching one CSV per URI."""

    def __init__(
        self,
        client: SpotifyClient | None = None,
        cache_root: str | Path | None = None,
        accept_truncated: bool = False,
        lyrics: LyricsProvider | None = None,
        clock=time.monotonic,
    ):
        self.client = client if client is not None else SpotifyClient(clock=clock)
        self.cache_root = Path(cache_root) if cache_root is not None else None
        self.accept_truncated = accept_truncated
        self.lyrics = lyrics if lyrics is not None else LyricsProvider()
        self._clock = clock
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, uri: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(uri, threading.Lock())

    # -- cache ------------------------------------------------------------

    def cache_lookup(self, link: SpotifyLink):
        """Return (payload, truncated) on a usable hit, else None."""
        if self.cache_root is None:
            return None
        path = cache_path(self.cache_root, link.uri)
        if not path.exists():
            return None
        from .export import read_track_csv

        try:
            payload, truncated = read_track_csv(path, link)
        except CorruptCacheFile as exc:
            bad = path.with_suffix(path.suffix + ".bad")
            log.warning("quarantining corrupt cache file %s: %s", path, exc)
            os.replace(path, bad)
            return None
        if truncated and not self.accept_truncated:
            log.info("cache entry for %s is truncated; re-resolving", link.uri)
            return None
        return payload, truncated

    def cache_store(self, result: ResolutionResult) -> Path | None:
        if self.cache_root is None or result.payload is None:
            return None
        from .export import write_track_csv

        return write_track_csv(result, self.cache_root)

    # -- resolution ---------------------------------------------------------

    def resolve(self, link: SpotifyLink, timeout_s: float = DEFAULT_TIMEOUT_S) -> ResolutionResult:
        """Resolve one link within a wall-clock budget. Never raises."""
        start = self._clock()

        def elapsed() -> int:
            return int((self._clock() - start) * 1000)

        with self._lock_for(link.uri):
            cached = self.cache_lookup(link)
            if cached is not None:
                payload, _truncated = cached
                return ResolutionResult(
                    uri=link.uri, status="ok", payload=payload, elapsed_ms=elapsed(), from_cache=True
                )

            deadline = start + timeout_s
            try:
                if link.kind == "track":
                    payload = self._resolve_track(link, deadline)
                else:
                    payload = self._resolve_collection(link, deadline)
            except LookupError:
                return ResolutionResult(
                    uri=link.uri, status="not_found", elapsed_ms=elapsed(), message="HTTP 404"
                )
            except (_DeadlineHit, TransportTimeout):
                log.warning("resolution of %s timed out after %.1f s", link.uri, timeout_s)
                return ResolutionResult(uri=link.uri, status="timed_out", elapsed_ms=elapsed())
            except Exception as exc:
                log.warning("resolution of %s failed: %s", link.uri, exc)
                return ResolutionResult(
                    uri=link.uri, status="error", elapsed_ms=elapsed(), message=str(exc)
                )

            status = "ok"
            if isinstance(payload, CollectionMetadata) and payload.truncated:
                status = "timed_out"
            result = ResolutionResult(
                uri=link.uri, status=status, payload=payload, elapsed_ms=elapsed()
            )
            try:
                self.cache_store(result)
            except OSError as exc:
                log.warning("could not cache %s: %s", link.uri, exc)
            return result

    def resolve_all(
        self,
        links: list[SpotifyLink],
        timeout_s: float = DEFAULT_TIMEOUT_S,
        concurrency: int = 2,
    ) -> list[ResolutionResult]:
        """Resolve deduplicated URIs concurrently; output order matches input."""
        if not links:
            return []
        unique: dict[str, SpotifyLink] = {}
        for link in links:
            unique.setdefault(link.uri, link)
        results: dict[str, ResolutionResult] = {}
        with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
            futures = {
                uri: pool.submit(self.resolve, link, timeout_s) for uri, link in unique.items()
            }
            for uri, future in futures.items():
                results[uri] = future.result()
        return [results[link.uri] for link in links]

    # -- per-kind fetch ------------------------------------------------------

    def _resolve_track(self, link: SpotifyLink, deadline: float) -> TrackMetadata:
        obj = self.client.get(f"/v1/tracks/{link.resource_id}", None, deadline)
        track, artist_ids = _track_from_obj(obj)
        if not track.uri:
            track.uri = link.uri
        self._attach_genres([(track, artist_ids)], deadline)
        self._attach_lyrics([track])
        return track

    def _resolve_collection(self, link: SpotifyLink, deadline: float) -> CollectionMetadata:
        head = self.client.get(f"/v1/{link.kind}s/{link.resource_id}", None, deadline)
        name = head.get("name", "")
        album_obj = head if link.kind == "album" else None
        page = head.get("tracks", {}) or {}
        total = int(page.get("total", len(page.get("items", []))))

        parsed: list[tuple[TrackMetadata, list[str]]] = []
        truncated = False
        while True:
            items = page.get("items", []) or []
            for item in items:
                obj = item.get("track", item) if link.kind == "playlist" else item
                if obj:
                    parsed.append(_track_from_obj(obj, album_obj=album_obj))
            if len(parsed) >= total or not items:
                break
            try:
                page = self.client.get(
                    f"/v1/{link.kind}s/{link.resource_id}/tracks",
                    {"limit": TRACKS_PER_PAGE, "offset": len(parsed)},
                    deadline,
                )
            except (_DeadlineHit, TransportTimeout):
                truncated = True
                log.warning(
                    "%s: budget exhausted after %d/%d tracks; keeping complete pages",
                    link.uri,
                    len(parsed),
                    total,
                )
                break

        tracks = [track for track, _ids in parsed]
        collection = CollectionMetadata(
            kind=link.kind, name=name, uri=link.uri, tracks=tracks, truncated=truncated
        )
        self._attach_genres(parsed, deadline)
        self._attach_lyrics(tracks)
        return collection

    def _attach_genres(self, parsed: list[tuple[TrackMetadata, list[str]]], deadline: float) -> None:
        """Best-effort genre lookup via batched artist fetches."""
        ids = sorted({aid for _track, artist_ids in parsed for aid in artist_ids})
        if not ids:
            return
        genres_by_artist: dict[str, list[str]] = {}
        for i in range(0, len(ids), ARTISTS_PER_CALL):
            batch = ids[i : i + ARTISTS_PER_CALL]
            try:
                body = self.client.get("/v1/artists", {"ids": ",".join(batch)}, deadline)
            except (_DeadlineHit, TransportTimeout):
                log.info("genre lookup skipped for %d artists: budget exhausted", len(ids) - i)
                break
            except (TransportError, AuthError, LookupError) as exc:
                log.warning("genre lookup failed: %s", exc)
                break
            for artist in body.get("artists", []) or []:
                if artist:
                    genres_by_artist[artist.get("id", "")] = list(artist.get("genres", []) or [])
        for track, artist_ids in parsed:
            found: set[str] = set()
            for aid in artist_ids:
                found.update(genres_by_artist.get(aid, []))
            track.genres = sorted(found)

    def _attach_lyrics(self, tracks: list[TrackMetadata]) -> None:
        for track in tracks:
            if track.lyrics is None:
                track.lyrics = self.lyrics.lyrics_for(track.track_name, track.artist_names)
