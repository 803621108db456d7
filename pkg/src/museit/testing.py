"""Test doubles: a fake clock and in-memory Reddit/Spotify backends.

The fakes implement the Transport interface and speak the same JSON shapes
as the real services, so the production clients run against them unchanged.
Recorded fixture files are produced by wrapping these fakes in a
RecordingTransport (see tools/gen_fixtures.py), which keeps fixtures and
fakes from drifting apart.
"""

from __future__ import annotations

import threading
import time
from urllib.parse import parse_qsl, urlsplit

from .errors import TransportTimeout
from .transport import Transport, TransportResponse


class FakeClock:
    """Manually advanced monotonic clock; sleep() just moves time forward."""

    def __init__(self, start: float = 0.0):
        self._now = float(start)
        self._lock = threading.Lock()

    def __call__(self) -> float:
        with self._lock:
            return self._now

    def advance(self, seconds: float) -> None:
        with self._lock:
            self._now += float(seconds)

    def sleep(self, seconds: float) -> None:
        self.advance(seconds)


def _merge_params(url: str, params: dict | None) -> tuple[str, dict]:
    parts = urlsplit(url)
    merged = dict(parse_qsl(parts.query, keep_blank_values=True))
    if params:
        merged.update({k: str(v) for k, v in params.items()})
    return parts.path, merged


class InMemoryReddit(Transport):
    """Serves the subset of the Reddit JSON API the client uses.

    subreddits maps name -> list of post dicts with keys
    id, title, selftext, url, num_comments, created_utc.
    comments maps post_id -> list of nested comment dicts with keys
    id, body, created_utc and optional replies (same shape recursively).
    """

    def __init__(
        self,
        subreddits: dict[str, list[dict]],
        comments: dict[str, list[dict]] | None = None,
        discovery: dict[str, list[str]] | None = None,
        page_size: int = 100,
        deleted_posts: set[str] | None = None,
        failing_subreddits: dict[str, int] | None = None,
    ):
        self.subreddits = subreddits
        self.comments = comments or {}
        self.discovery = discovery
        self.page_size = page_size
        self.deleted_posts = deleted_posts or set()
        self.failing_subreddits = failing_subreddits or {}
        self.calls: list[tuple[str, str, dict]] = []

    def request(self, method, url, params=None, headers=None, data=None, timeout=None):
        path, query = _merge_params(url, params)
        self.calls.append((method.upper(), path, query))

        if path == "/api/v1/access_token":
            return TransportResponse(200, {"access_token": "fake-reddit-token", "expires_in": 3600})

        if path == "/subreddits/search.json":
            q = query.get("q", "")
            if self.discovery is not None:
                names = self.discovery.get(q, [])
            else:
                names = list(self.subreddits)
            children = [{"kind": "t5", "data": {"display_name": n}} for n in names]
            return TransportResponse(200, {"data": {"children": children}})

        if path.startswith("/r/") and path.endswith("/search.json"):
            name = path[len("/r/") : -len("/search.json")]
            if name in self.failing_subreddits:
                return TransportResponse(self.failing_subreddits[name], {"error": "boom"})
            if name not in self.subreddits:
                return TransportResponse(404, {"message": "Not Found", "error": 404})
            posts = self.subreddits[name]
            offset = int(query.get("after") or 0)
            limit = min(int(query.get("limit", 100)), self.page_size)
            page = posts[offset : offset + limit]
            children = [{"kind": "t3", "data": dict(p)} for p in page]
            nxt = offset + len(page)
            after = str(nxt) if nxt < len(posts) else None
            return TransportResponse(200, {"data": {"children": children, "after": after}})

        if path.startswith("/comments/") and path.endswith(".json"):
            post_id = path[len("/comments/") : -len(".json")]
            if post_id in self.deleted_posts:
                return TransportResponse(404, {"message": "Not Found", "error": 404})
            tree = self.comments.get(post_id, [])
            return TransportResponse(
                200,
                [
                    {"data": {"children": []}},
                    {"data": {"children": [self._comment_child(c) for c in tree]}},
                ],
            )

        return TransportResponse(404, {"message": "Not Found", "error": 404})

    def _comment_child(self, node: dict) -> dict:
        data = {
            "id": node["id"],
            "body": node.get("body", ""),
            "created_utc": node.get("created_utc", 0),
        }
        replies = node.get("replies") or []
        if replies:
            data["replies"] = {"data": {"children": [self._comment_child(r) for r in replies]}}
        else:
            data["replies"] = ""
        return {"kind": "t1", "data": data}


def track_obj(
    track_id: str,
    name: str,
    artists: list[tuple[str, str]],
    album_name: str | None = "Album",
    release_date: str = "2020-01-01",
    duration_ms: int = 200000,
    explicit: bool = False,
    popularity: int = 50,
) -> dict:
    """Full track object as /v1/tracks returns it; album=None gives the
    bare shape album and playlist pages use."""
    obj = {
        "id": track_id,
        "uri": f"spotify:track:{track_id}",
        "name": name,
        "artists": [{"id": aid, "name": aname} for aid, aname in artists],
        "duration_ms": duration_ms,
        "explicit": explicit,
        "popularity": popularity,
    }
    if album_name is not None:
        obj["album"] = {"name": album_name, "release_date": release_date}
    return obj


def album_obj(album_id, name, tracks, release_date="2020-01-01", label="Fake Label", copyrights=("(C) Fake",)):
    return {
        "id": album_id,
        "uri": f"spotify:album:{album_id}",
        "name": name,
        "release_date": release_date,
        "label": label,
        "copyrights": [{"text": t, "type": "C"} for t in copyrights],
        "tracks": list(tracks),
    }


def playlist_obj(playlist_id, name, tracks):
    return {
        "id": playlist_id,
        "uri": f"spotify:playlist:{playlist_id}",
        "name": name,
        "tracks": list(tracks),
    }


def artist_obj(artist_id, name, genres=()):
    return {"id": artist_id, "name": name, "genres": list(genres)}


class InMemorySpotify(Transport):
    """Serves the Spotify Web API subset: tracks, album/playlist pages,
    batched artists, and the client-credentials token endpoint.

    stalls maps (kind, id, offset) -> seconds: a matching page request
    sleeps; if the request's timeout is smaller it raises TransportTimeout
    after timeout seconds instead, the way a socket timeout behaves.
    """

    def __init__(
        self,
        tracks: dict[str, dict] | None = None,
        albums: dict[str, dict] | None = None,
        playlists: dict[str, dict] | None = None,
        artists: dict[str, dict] | None = None,
        page_size: int = 100,
        stalls: dict[tuple[str, str, int], float] | None = None,
        sleep=time.sleep,
    ):
        self.tracks = tracks or {}
        self.albums = albums or {}
        self.playlists = playlists or {}
        self.artists = artists or {}
        self.page_size = page_size
        self.stalls = stalls or {}
        self.sleep = sleep
        self.calls: list[tuple[str, str, dict]] = []
        self._lock = threading.Lock()

    def request(self, method, url, params=None, headers=None, data=None, timeout=None):
        path, query = _merge_params(url, params)
        with self._lock:
            self.calls.append((method.upper(), path, query))

        if path == "/api/token":
            return TransportResponse(200, {"access_token": "fake-spotify-token", "expires_in": 3600})

        if path.startswith("/v1/tracks/"):
            track_id = path[len("/v1/tracks/") :]
            obj = self.tracks.get(track_id)
            if obj is None:
                return TransportResponse(404, {"error": {"status": 404, "message": "not found"}})
            return TransportResponse(200, obj)

        if path == "/v1/artists":
            ids = query.get("ids", "").split(",") if query.get("ids") else []
            found = [self.artists.get(i) for i in ids]
            return TransportResponse(200, {"artists": found})

        for kind, catalog in (("album", self.albums), ("playlist", self.playlists)):
            head_prefix = f"/v1/{kind}s/"
            if not path.startswith(head_prefix):
                continue
            rest = path[len(head_prefix) :]
            if rest.endswith("/tracks"):
                rid = rest[: -len("/tracks")]
                obj = catalog.get(rid)
                if obj is None:
                    return TransportResponse(404, {"error": {"status": 404, "message": "not found"}})
                offset = int(query.get("offset", 0))
                limit = min(int(query.get("limit", self.page_size)), self.page_size)
                self._maybe_stall(kind, rid, offset, timeout)
                items = self._items(kind, obj)[offset : offset + limit]
                return TransportResponse(200, {"items": items, "total": len(self._items(kind, obj))})
            rid = rest
            obj = catalog.get(rid)
            if obj is None:
                return TransportResponse(404, {"error": {"status": 404, "message": "not found"}})
            self._maybe_stall(kind, rid, 0, timeout)
            body = {k: v for k, v in obj.items() if k != "tracks"}
            items = self._items(kind, obj)
            body["tracks"] = {"items": items[: self.page_size], "total": len(items)}
            return TransportResponse(200, body)

        return TransportResponse(404, {"error": {"status": 404, "message": "not found"}})

    def _items(self, kind: str, obj: dict) -> list[dict]:
        tracks = obj.get("tracks", [])
        if kind == "playlist":
            return [{"track": t} for t in tracks]
        return [{k: v for k, v in t.items() if k != "album"} for t in tracks]

    def _maybe_stall(self, kind: str, rid: str, offset: int, timeout) -> None:
        stall = self.stalls.get((kind, rid, offset))
        if not stall:
            return
        if timeout is not None and timeout < stall:
            self.sleep(timeout)
            raise TransportTimeout(f"fake stall on {kind} {rid} page at {offset}")
        self.sleep(stall)
