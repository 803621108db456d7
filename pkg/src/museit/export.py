"""Schema-stable CSV export of the unified dataset and track metadata.

data.csv column contract (the compatibility surface for downstream
analysis):

    reddit_post_id, subreddit, title, post_body, post_url,
    created_utc_iso, created_utc, num_comments, urls, spotify_urls
    [+ comments, comment_spotify_urls        when comments were retrieved]
    [+ theme, sentiment, emotion, topic_id   unless the job was scrape-only]

Multi-valued cells join their elements with " | "; comment records are
separated by a "\\n---\\n" line. Both sequences are reserved: the writer
rejects values containing them (the pipeline sanitizes comment text before
export). Files are UTF-8 with RFC-4180 quoting and are written to a
temporary file, then atomically renamed, so a crash can never leave a
half-written file under the real name.

Track metadata files (one per Spotify URI, used both as cache and export)
carry the columns:

    uri, track_name, artists, album_name, genres, release_date, year,
    duration_ms, explicit, popularity, publisher, copyright_text,
    lyrics_present, source_kind, truncated

Collection files hold one row per contained track in platform order.
"""

from __future__ import annotations

import csv
import logging
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .errors import CorruptCacheFile, DuplicatePrimaryKey, ParseError
from .tracks import CollectionMetadata, ResolutionResult, TrackMetadata, cache_path

log = logging.getLogger(__name__)

LIST_JOINER = " | "
COMMENT_SEPARATOR = "\n---\n"

BASE_COLUMNS = [
    "reddit_post_id",
    "subreddit",
    "title",
    "post_body",
    "post_url",
    "created_utc_iso",
    "created_utc",
    "num_comments",
    "urls",
    "spotify_urls",
]
COMMENT_COLUMNS = ["comments", "comment_spotify_urls"]
NLP_COLUMNS = ["theme", "sentiment", "emotion", "topic_id"]

TRACK_COLUMNS = [
    "uri",
    "track_name",
    "artists",
    "album_name",
    "genres",
    "release_date",
    "year",
    "duration_ms",
    "explicit",
    "popularity",
    "publisher",
    "copyright_text",
    "lyrics_present",
    "source_kind",
    "truncated",
]


@dataclass
class DataRow:
    reddit_post_id: str
    subreddit: str
    title: str
    post_body: str
    post_url: str
    created_utc: int
    num_comments: int
    urls: list[str]
    spotify_urls: list[str]
    comments: list[str] | None = None
    comment_spotify_urls: list[str] | None = None
    theme: str | None = None
    sentiment: str | None = None
    emotion: str | None = None
    topic_id: int | None = None


def data_columns(include_comments: bool, only_scraping: bool) -> list[str]:
    columns = list(BASE_COLUMNS)
    if include_comments:
        columns += COMMENT_COLUMNS
    if not only_scraping:
        columns += NLP_COLUMNS
    return columns


def _atomic_csv(path: Path, rows: list[list[str]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerows(rows)
        # mkstemp files are 0600; give the export normal umask-based permissions
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp_name, 0o666 & ~umask)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return path


def _join_list(values: list[str], column: str) -> str:
    for value in values:
        if value == "":
            raise ValueError(f"empty element in {column} cell is not representable")
        if LIST_JOINER in value:
            raise ValueError(f"{column} element contains the reserved sequence {LIST_JOINER!r}")
    return LIST_JOINER.join(values)


def _join_comments(values: list[str]) -> str:
    for value in values:
        if value == "":
            raise ValueError("empty comment body is not representable")
        if COMMENT_SEPARATOR in value:
            raise ValueError(f"comment contains the reserved sequence {COMMENT_SEPARATOR!r}")
    return COMMENT_SEPARATOR.join(values)


def _split_list(cell: str) -> list[str]:
    return cell.split(LIST_JOINER) if cell else []


def _split_comments(cell: str) -> list[str]:
    return cell.split(COMMENT_SEPARATOR) if cell else []


def _iso_utc(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def write_data_csv(
    rows: list[DataRow],
    job_dir: str | Path,
    include_comments: bool = False,
    only_scraping: bool = False,
) -> Path:
    """Write <job_dir>/data.csv. reddit_post_id is the primary key."""
    if not rows:
        raise ValueError("refusing to write an empty data.csv")
    seen: set[str] = set()
    out: list[list[str]] = [data_columns(include_comments, only_scraping)]
    for row in rows:
        if row.reddit_post_id in seen:
            raise DuplicatePrimaryKey(f"duplicate reddit_post_id {row.reddit_post_id!r}")
        seen.add(row.reddit_post_id)
        cells = [
            row.reddit_post_id,
            row.subreddit,
            row.title,
            row.post_body,
            row.post_url,
            _iso_utc(row.created_utc),
            str(row.created_utc),
            str(row.num_comments),
            _join_list(row.urls, "urls"),
            _join_list(row.spotify_urls, "spotify_urls"),
        ]
        if include_comments:
            cells.append(_join_comments(row.comments or []))
            cells.append(_join_list(row.comment_spotify_urls or [], "comment_spotify_urls"))
        if not only_scraping:
            cells.append(row.theme or "")
            cells.append(row.sentiment or "")
            cells.append(row.emotion or "")
            cells.append("" if row.topic_id is None else str(row.topic_id))
        out.append(cells)
    return _atomic_csv(Path(job_dir) / "data.csv", out)


def read_data_csv(path: str | Path) -> list[DataRow]:
    """Inverse of write_data_csv for files it produced (column groups inferred)."""
    path = Path(path)
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("file is empty", line=1) from None
        include_comments = "comments" in header
        only_scraping = "theme" not in header
        expected = data_columns(include_comments, only_scraping)
        if header != expected:
            raise ParseError(f"unexpected header {header!r}, expected {expected!r}", line=1)

        rows: list[DataRow] = []
        seen: set[str] = set()
        for lineno, cells in enumerate(reader, start=2):
            if len(cells) != len(expected):
                raise ParseError(
                    f"expected {len(expected)} cells, got {len(cells)}", line=lineno
                )
            record = dict(zip(expected, cells))

            def _int(column: str) -> int:
                try:
                    return int(record[column])
                except ValueError:
                    raise ParseError(
                        f"bad integer in column {column!r}: {record[column]!r}",
                        line=lineno,
                        column=expected.index(column) + 1,
                    ) from None

            row = DataRow(
                reddit_post_id=record["reddit_post_id"],
                subreddit=record["subreddit"],
                title=record["title"],
                post_body=record["post_body"],
                post_url=record["post_url"],
                created_utc=_int("created_utc"),
                num_comments=_int("num_comments"),
                urls=_split_list(record["urls"]),
                spotify_urls=_split_list(record["spotify_urls"]),
            )
            if include_comments:
                row.comments = _split_comments(record["comments"])
                row.comment_spotify_urls = _split_list(record["comment_spotify_urls"])
            if not only_scraping:
                row.theme = record["theme"]
                row.sentiment = record["sentiment"]
                row.emotion = record["emotion"]
                row.topic_id = _int("topic_id") if record["topic_id"] != "" else None
            if row.reddit_post_id in seen:
                raise DuplicatePrimaryKey(f"duplicate reddit_post_id {row.reddit_post_id!r}")
            seen.add(row.reddit_post_id)
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# Track metadata files


def _bool(value: bool) -> str:
    return "true" if value else "false"


def _track_cells(track: TrackMetadata, source_kind: str, truncated: bool):
    return [
        track.uri,
        track.track_name,
        _join_list(track.artist_names, "artists"),
        track.album_name,
        _join_list(track.genres, "genres"),
        track.release_date,
        str(track.year),
        str(track.duration_ms),
        _bool(track.explicit),
        str(track.popularity),
        track.publisher or "",
        track.copyright_text or "",
        _bool(bool(track.lyrics)),
        source_kind,
        _bool(truncated),
    ]


def write_track_csv(result: ResolutionResult, cache_root: str | Path) -> Path:
    """Write the per-URI metadata CSV for an ok or truncated resolution."""
    payload = result.payload
    if payload is None:
        raise ValueError(f"nothing to write for {result.uri} (status {result.status})")
    path = cache_path(cache_root, result.uri)
    rows: list[list[str]] = [list(TRACK_COLUMNS)]
    if isinstance(payload, CollectionMetadata):
        for track in payload.tracks:
            rows.append(_track_cells(track, payload.kind, payload.truncated))
    else:
        rows.append(_track_cells(payload, "track", False))
    return _atomic_csv(path, rows)


def read_track_csv(path: str | Path, link) -> tuple[TrackMetadata | CollectionMetadata, bool]:
    """Parse a per-URI metadata CSV back into its payload.

    Raises CorruptCacheFile on any structural problem so callers can
    quarantine the file and re-resolve.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8-sig", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != TRACK_COLUMNS:
                raise CorruptCacheFile(f"unexpected header in {path.name}")
            tracks: list[TrackMetadata] = []
            truncated = False
            for cells in reader:
                if len(cells) != len(TRACK_COLUMNS):
                    raise CorruptCacheFile(f"short row in {path.name}")
                record = dict(zip(TRACK_COLUMNS, cells))
                tracks.append(
                    TrackMetadata(
                        track_name=record["track_name"],
                        artist_names=_split_list(record["artists"]),
                        album_name=record["album_name"],
                        genres=_split_list(record["genres"]),
                        release_date=record["release_date"],
                        year=int(record["year"]),
                        duration_ms=int(record["duration_ms"]),
                        explicit=record["explicit"] == "true",
                        popularity=int(record["popularity"]),
                        uri=record["uri"],
                        publisher=record["publisher"] or None,
                        copyright_text=record["copyright_text"] or None,
                        lyrics=None,
                    )
                )
                truncated = record["truncated"] == "true"
    except (ValueError, OSError, csv.Error) as exc:
        raise CorruptCacheFile(f"{path.name}: {exc}") from exc

    if link.kind == "track":
        if len(tracks) != 1:
            raise CorruptCacheFile(f"{path.name}: expected exactly one track row")
        return tracks[0], False
    return (
        # the display name is not part of the file schema; cache hits come back nameless
        CollectionMetadata(kind=link.kind, name="", uri=link.uri, tracks=tracks, truncated=truncated),
        truncated,
    )
