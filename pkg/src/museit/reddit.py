"""Rate-limited Reddit client: subreddit discovery, post search, comments.

Two access modes, chosen by credential presence:

* app credentials (REDDIT_CLIENT_ID / REDDIT_CLIENT_SECRET set): a
  client-credentials token is fetched once and requests go to
  oauth.reddit.com. No user account is involved.
* anonymous: the public read-only JSON endpoints on www.reddit.com.

MUSEIT_USER_AGENT overrides the User-Agent header in both modes.

All outbound requests, token fetches included, pass through one shared
token bucket per rate budget, so several client instances in one process
still respect a single combined request budget.
"""

from __future__ import annotations

import base64
import logging
import os
from dataclasses import dataclass, field

from . import __version__
from .errors import AuthError, EmptyQuery, SubredditNotFound, TransportError
from .ratelimit import RateBudget, bucket_for
from .transport import HttpTransport, Transport, TransportResponse

log = logging.getLogger(__name__)

PUBLIC_BASE = "https://www.reddit.com"
OAUTH_BASE = "https://oauth.reddit.com"
TOKEN_URL = "https://www.reddit.com/api/v1/access_token"

PAGE_LIMIT = 100
POST_CAP = 1000
COMMENT_PAGE_LIMIT = 500


@dataclass
class SubredditRef:
    name: str
    approx_post_count: int
    selected: bool = False

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise ValueError(f"bad subreddit name: {self.name!r}")
        if self.approx_post_count < 0:
            raise ValueError("approx_post_count must be >= 0")


@dataclass
class RedditComment:
    comment_id: str
    parent_post_id: str
    body: str
    created_utc: int


@dataclass
class RedditPost:
    post_id: str
    subreddit: str
    title: str
    body: str
    post_url: str
    num_comments: int
    created_utc: int
    comments: list[RedditComment] | None = None


def _user_agent() -> str:
    return os.environ.get("MUSEIT_USER_AGENT", f"museit/{__version__}")


class RedditClient:
    """Paginated, rate-limited client over the platform's JSON API."""

    def __init__(
        self,
        transport: Transport | None = None,
        budget: RateBudget | None = None,
        sort: str = "relevance",
        client_id: str | None = None,
        client_secret: str | None = None,
    ):
        self.transport = transport if transport is not None else HttpTransport()
        self.budget = budget if budget is not None else RateBudget()
        self.sort = sort
        self._client_id = client_id if client_id is not None else os.environ.get("REDDIT_CLIENT_ID")
        self._client_secret = (
            client_secret if client_secret is not None else os.environ.get("REDDIT_CLIENT_SECRET")
        )
        self._token: str | None = None
        self._bucket = bucket_for(self.budget)

    # -- plumbing ---------------------------------------------------------

    @property
    def _authenticated(self) -> bool:
        return bool(self._client_id and self._client_secret)

    @property
    def base_url(self) -> str:
        return OAUTH_BASE if self._authenticated else PUBLIC_BASE

    def _fetch_token(self) -> str:
        basic = base64.b64encode(f"{self._client_id}:{self._client_secret}".encode()).decode()
        self._bucket.acquire()
        resp = self.transport.request(
            "POST",
            TOKEN_URL,
            headers={"Authorization": f"Basic {basic}", "User-Agent": _user_agent()},
            data={"grant_type": "client_credentials"},
        )
        if resp.status != 200:
            raise AuthError(f"token request failed: HTTP {resp.status}")
        token = resp.body.get("access_token") if isinstance(resp.body, dict) else None
        if not token:
            raise AuthError("token response carried no access_token")
        return token

    def _get(self, path: str, params: dict) -> TransportResponse:
        headers = {"User-Agent": _user_agent()}
        if self._authenticated:
            if self._token is None:
                self._token = self._fetch_token()
            headers["Authorization"] = f"Bearer {self._token}"
        self._bucket.acquire()
        return self.transport.request("GET", self.base_url + path, params=params, headers=headers)

    @staticmethod
    def _check(resp: TransportResponse, context: str) -> None:
        if resp.status in (401, 403):
            raise AuthError(f"{context}: HTTP {resp.status}")
        if resp.status >= 500:
            raise TransportError(f"{context}: HTTP {resp.status}")

    # -- operations -------------------------------------------------------

    def discover_subreddits(self, query: str) -> list[SubredditRef]:
        """Search for subreddits and attach a first-page hit count to each.

        The count is the number of matches on one preliminary search page
        (at most 100), which is cheap and good enough for ranking; it is not
        a full census.
        """
        if not query or not query.strip():
            raise EmptyQuery("discovery query is empty")
        query = query.strip()
        resp = self._get("/subreddits/search.json", {"q": query, "limit": PAGE_LIMIT})
        self._check(resp, "subreddit search")
        if resp.status != 200:
            raise TransportError(f"subreddit search: HTTP {resp.status}")

        names: list[str] = []
        seen: set[str] = set()
        for child in resp.body.get("data", {}).get("children", []):
            name = child.get("data", {}).get("display_name")
            if name and name not in seen:
                seen.add(name)
                names.append(name)

        refs = []
        for name in names:
            try:
                page = self._search_page(name, query, after=None)
            except SubredditNotFound:
                log.warning("subreddit r/%s vanished between discovery and count", name)
                continue
            count = len(page["posts"])
            refs.append(SubredditRef(name=name, approx_post_count=count))
        refs.sort(key=lambda r: (-r.approx_post_count, r.name))
        log.info("discovered %d subreddits for query %r", len(refs), query)
        return refs

    def _search_page(self, subreddit: str, query: str, after: str | None) -> dict:
        params = {
            "q": query,
            "restrict_sr": 1,
            "limit": PAGE_LIMIT,
            "sort": self.sort,
        }
        if after:
            params["after"] = after
        resp = self._get(f"/r/{subreddit}/search.json", params)
        if resp.status == 404:
            raise SubredditNotFound(f"r/{subreddit} not found")
        self._check(resp, f"search r/{subreddit}")
        if resp.status != 200:
            raise TransportError(f"search r/{subreddit}: HTTP {resp.status}")
        data = resp.body.get("data", {})
        posts = []
        for child in data.get("children", []):
            d = child.get("data", {})
            posts.append(
                RedditPost(
                    post_id=str(d["id"]),
                    subreddit=subreddit,
                    title=d.get("title", ""),
                    body=d.get("selftext", "") or "",
                    post_url=d.get("url") or (PUBLIC_BASE + d.get("permalink", "")),
                    num_comments=int(d.get("num_comments", 0)),
                    created_utc=int(d.get("created_utc", 0)),
                )
            )
        return {"posts": posts, "after": data.get("after")}

    def search_posts(self, subreddit: str, query: str, cap: int = POST_CAP) -> list[RedditPost]:
        """Page through search results until the cursor runs out or cap is hit.

        The cap is clamped to 1000 posts per subreddit at the API boundary;
        asking for more is a caller bug.
        """
        if not 1 <= cap <= POST_CAP:
            raise ValueError(f"cap must be in 1..{POST_CAP}, got {cap}")
        posts: list[RedditPost] = []
        seen: set[str] = set()
        after: str | None = None
        page_no = 0
        while len(posts) < cap:
            page = self._search_page(subreddit, query, after)
            page_no += 1
            for post in page["posts"]:
                if post.post_id not in seen:
                    seen.add(post.post_id)
                    posts.append(post)
            log.debug("r/%s: page %d, %d posts so far", subreddit, page_no, len(posts))
            after = page["after"]
            if not after:
                break
        del posts[cap:]
        log.info("r/%s: retrieved %d posts in %d pages", subreddit, len(posts), page_no)
        return posts

    def fetch_comments(self, post: RedditPost) -> list[RedditComment]:
        """Retrieve and flatten the full comment tree, depth-first.

        A deleted/missing post is degraded input, not an error: it logs a
        warning and yields an empty list.
        """
        resp = self._get(f"/comments/{post.post_id}.json", {"limit": COMMENT_PAGE_LIMIT})
        if resp.status == 404:
            log.warning("post %s is gone; treating as having no comments", post.post_id)
            post.comments = []
            return []
        self._check(resp, f"comments for {post.post_id}")
        if resp.status != 200:
            raise TransportError(f"comments for {post.post_id}: HTTP {resp.status}")

        comments: list[RedditComment] = []

        def walk(children: list) -> None:
            for child in children:
                if child.get("kind") != "t1":
                    continue
                d = child.get("data", {})
                comments.append(
                    RedditComment(
                        comment_id=str(d.get("id", "")),
                        parent_post_id=post.post_id,
                        body=d.get("body", "") or "",
                        created_utc=int(d.get("created_utc", 0)),
                    )
                )
                replies = d.get("replies")
                if isinstance(replies, dict):
                    walk(replies.get("data", {}).get("children", []))

        body = resp.body
        if isinstance(body, list) and len(body) >= 2:
            walk(body[1].get("data", {}).get("children", []))
        post.comments = comments
        return comments
