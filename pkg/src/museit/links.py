"""URL harvesting and Spotify link classification.

This stage is pure text processing: it never touches the network. URLs are
pulled from titles, bodies, and comment bodies; Spotify links pointing at a
track, album, or playlist are normalized to a canonical URL and a
"spotify:<kind>:<id>" URI. Short-link hosts (spotify.link) are not expanded,
since that would require a network round trip inside a parser.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from urllib.parse import urlsplit

from .errors import MalformedUrl
from .reddit import RedditPost

SPOTIFY_KINDS = ("track", "album", "playlist")

# Greedy run of non-whitespace after the scheme; trailing punctuation is
# trimmed afterwards. Markdown links "[label](http://...)" need no special
# casing: the closing ")" is unbalanced within the URL and gets stripped.
_URL_RE = re.compile(r"https?://[^\s<>\"\]\[]+", re.IGNORECASE)

_ID_RE = re.compile(r"^[0-9A-Za-z]{22}$")
_LOCALE_RE = re.compile(r"^intl-[a-z]{2}(-[a-zA-Z]{2})?$")

# Characters trimmed from the end of a harvested URL. ")" is only trimmed
# while the parentheses inside the URL are unbalanced, so Wikipedia-style
# paths like /Music_(genre) survive.
_TRAILING = ".,;"


@dataclass(frozen=True)
class SpotifyLink:
    kind: str  # track | album | playlist
    resource_id: str
    source: str = "post_body"  # post_body | comment

    def __post_init__(self):
        if self.kind not in SPOTIFY_KINDS:
            raise MalformedUrl(f"unsupported spotify kind: {self.kind!r}")
        if not _ID_RE.match(self.resource_id):
            raise MalformedUrl(f"bad spotify resource id: {self.resource_id!r}")

    @property
    def uri(self) -> str:
        return f"spotify:{self.kind}:{self.resource_id}"

    @property
    def canonical_url(self) -> str:
        return f"https://open.spotify.com/{self.kind}/{self.resource_id}"


@dataclass
class ExtractedLinks:
    post_id: str
    all_urls: list[str] = field(default_factory=list)
    spotify_urls: list[SpotifyLink] = field(default_factory=list)
    comment_spotify_urls: list[SpotifyLink] = field(default_factory=list)


def _strip_trailing(url: str) -> str:
    while url:
        last = url[-1]
        if last in _TRAILING:
            url = url[:-1]
        elif last == ")" and url.count("(") < url.count(")"):
            url = url[:-1]
        else:
            break
    return url


def extract_urls(text: str) -> list[str]:
    """Return every absolute http/https URL in the text, in order.

    Duplicates are preserved; trailing '.', ',', ';' and unbalanced ')' are
    stripped from each hit.
    """
    urls = []
    for match in _URL_RE.finditer(text or ""):
        url = _strip_trailing(match.group(0))
        # trimming can leave a bare "https://"; that is not a URL
        if len(url) > url.lower().find("://") + 3:
            urls.append(url)
    return urls


def classify_spotify_url(url: str, source: str = "post_body") -> SpotifyLink | None:
    """Classify a URL as a Spotify track/album/playlist link, or None.

    Locale path segments (/intl-de/ etc.) are tolerated; query strings are
    dropped. Artist, episode, and show pages are not collection or track
    references, so they classify as None.
    """
    parts = urlsplit(url)
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise MalformedUrl(f"not an absolute http(s) URL: {url!r}")
    if parts.netloc.lower() != "open.spotify.com":
        return None
    segments = [s for s in parts.path.split("/") if s]
    if segments and _LOCALE_RE.match(segments[0]):
        segments = segments[1:]
    if len(segments) != 2:
        return None
    kind, resource_id = segments
    if kind not in SPOTIFY_KINDS or not _ID_RE.match(resource_id):
        return None
    return SpotifyLink(kind=kind, resource_id=resource_id, source=source)


def _dedupe(links: list[SpotifyLink]) -> list[SpotifyLink]:
    seen = set()
    out = []
    for link in links:
        if link.uri not in seen:
            seen.add(link.uri)
            out.append(link)
    return out


def extract_for_post(post: RedditPost) -> ExtractedLinks:
    """Harvest and classify links for one post.

    Post-level links come from title + body; comment links are collected only
    when comments were actually retrieved (post.comments is not None). Each
    Spotify list is deduplicated by URI, first occurrence wins; the two lists
    are independent, so a track linked in both the body and a comment shows
    up in both.
    """
    all_urls = extract_urls(post.title) + extract_urls(post.body)
    spotify = [classify_spotify_url(u) for u in all_urls]
    spotify_urls = _dedupe([s for s in spotify if s is not None])

    comment_links: list[SpotifyLink] = []
    if post.comments is not None:
        for comment in post.comments:
            for url in extract_urls(comment.body):
                link = classify_spotify_url(url, source="comment")
                if link is not None:
                    comment_links.append(link)
    return ExtractedLinks(
        post_id=post.post_id,
        all_urls=all_urls,
        spotify_urls=spotify_urls,
        comment_spotify_urls=_dedupe(comment_links),
    )
