import pytest

from museit.errors import AuthError, EmptyQuery, SubredditNotFound, TransportError
from museit.reddit import POST_CAP, RedditClient, RedditPost, SubredditRef
from museit.testing import InMemoryReddit
from museit.transport import Transport

from conftest import FAST_BUDGET


def make_posts(prefix, n, num_comments=0):
    return [
        {
            "id": f"{prefix}{i:03d}",
            "title": f"{prefix} title {i}",
            "selftext": "",
            "url": f"https://example.test/{prefix}/{i}",
            "num_comments": num_comments,
            "created_utc": 1_577_880_000 + i,
        }
        for i in range(n)
    ]


def client_for(fake, **kwargs):
    kwargs.setdefault("client_id", "")
    kwargs.setdefault("client_secret", "")
    return RedditClient(transport=fake, budget=FAST_BUDGET, **kwargs)


class HeaderRecorder(Transport):
    """Wraps a transport and keeps the headers of every request."""

    def __init__(self, inner):
        self.inner = inner
        self.seen = []

    def request(self, method, url, params=None, headers=None, data=None, timeout=None):
        self.seen.append((method, url, dict(headers or {})))
        return self.inner.request(
            method, url, params=params, headers=headers, data=data, timeout=timeout
        )


class TestSubredditRef:
    def test_valid(self):
        ref = SubredditRef(name="MusicSuggestions", approx_post_count=3)
        assert ref.name == "MusicSuggestions"

    def test_bad_name(self):
        with pytest.raises(ValueError):
            SubredditRef(name="has space", approx_post_count=0)
        with pytest.raises(ValueError):
            SubredditRef(name="", approx_post_count=0)

    def test_negative_count(self):
        with pytest.raises(ValueError):
            SubredditRef(name="ok", approx_post_count=-1)


class TestDiscovery:
    def test_empty_query(self):
        client = client_for(InMemoryReddit({}))
        with pytest.raises(EmptyQuery):
            client.discover_subreddits("")
        with pytest.raises(EmptyQuery):
            client.discover_subreddits("   ")

    def test_query_is_stripped(self):
        fake = InMemoryReddit({"sadsongs": make_posts("a", 2)}, discovery={"sad": ["sadsongs"]})
        refs = client_for(fake).discover_subreddits("  sad  ")
        assert [r.name for r in refs] == ["sadsongs"]

    def test_ordering_by_count_then_name(self):
        fake = InMemoryReddit(
            {
                "zeta": make_posts("z", 5),
                "alpha": make_posts("a", 5),
                "mid": make_posts("m", 9),
            },
            discovery={"q": ["zeta", "alpha", "mid"]},
        )
        refs = client_for(fake).discover_subreddits("q")
        assert [(r.name, r.approx_post_count) for r in refs] == [
            ("mid", 9),
            ("alpha", 5),
            ("zeta", 5),
        ]

    def test_vanished_subreddit_is_skipped(self, caplog):
        fake = InMemoryReddit(
            {"real": make_posts("r", 1)},
            discovery={"q": ["real", "ghost"]},
        )
        with caplog.at_level("WARNING"):
            refs = client_for(fake).discover_subreddits("q")
        assert [r.name for r in refs] == ["real"]
        assert any("ghost" in rec.message for rec in caplog.records)

    def test_server_error_bubbles(self):
        fake = InMemoryReddit({"s": []}, discovery={"q": ["s"]}, failing_subreddits={"s": 500})
        with pytest.raises(TransportError):
            client_for(fake).discover_subreddits("q")


class TestSearchPosts:
    def test_pagination_walks_cursor(self):
        fake = InMemoryReddit({"sub": make_posts("p", 37)}, page_size=10)
        posts = client_for(fake).search_posts("sub", "q")
        assert len(posts) == 37
        assert [p.post_id for p in posts] == [f"p{i:03d}" for i in range(37)]
        search_calls = [c for c in fake.calls if c[1] == "/r/sub/search.json"]
        assert len(search_calls) == 4

    def test_cap_stops_paging_early(self):
        fake = InMemoryReddit({"sub": make_posts("p", 37)}, page_size=10)
        posts = client_for(fake).search_posts("sub", "q", cap=25)
        assert len(posts) == 25
        search_calls = [c for c in fake.calls if c[1] == "/r/sub/search.json"]
        assert len(search_calls) == 3

    def test_cap_bounds(self):
        client = client_for(InMemoryReddit({"sub": []}))
        with pytest.raises(ValueError):
            client.search_posts("sub", "q", cap=0)
        with pytest.raises(ValueError):
            client.search_posts("sub", "q", cap=POST_CAP + 1)

    def test_duplicate_ids_collapsed(self):
        rows = make_posts("p", 3)
        rows.append(dict(rows[0]))
        fake = InMemoryReddit({"sub": rows})
        posts = client_for(fake).search_posts("sub", "q")
        assert [p.post_id for p in posts] == ["p000", "p001", "p002"]

    def test_unknown_subreddit(self):
        client = client_for(InMemoryReddit({}))
        with pytest.raises(SubredditNotFound):
            client.search_posts("nope", "q")

    def test_auth_failure(self):
        fake = InMemoryReddit({"sub": []}, failing_subreddits={"sub": 403})
        with pytest.raises(AuthError):
            client_for(fake).search_posts("sub", "q")

    def test_field_mapping(self):
        fake = InMemoryReddit({"sub": make_posts("p", 1, num_comments=7)})
        post = client_for(fake).search_posts("sub", "q")[0]
        assert post.subreddit == "sub"
        assert post.title == "p title 0"
        assert post.num_comments == 7
        assert post.created_utc == 1_577_880_000
        assert post.post_url == "https://example.test/p/0"


class TestFetchComments:
    def test_nested_tree_flattened_depth_first(self):
        tree = [
            {
                "id": "c1",
                "body": "top",
                "created_utc": 1,
                "replies": [
                    {"id": "c2", "body": "child", "created_utc": 2,
                     "replies": [{"id": "c3", "body": "grandchild", "created_utc": 3}]},
                ],
            },
            {"id": "c4", "body": "second top", "created_utc": 4},
        ]
        fake = InMemoryReddit({"sub": make_posts("p", 1)}, comments={"p000": tree})
        client = client_for(fake)
        post = client.search_posts("sub", "q")[0]
        comments = client.fetch_comments(post)
        assert [c.comment_id for c in comments] == ["c1", "c2", "c3", "c4"]
        assert all(c.parent_post_id == "p000" for c in comments)
        assert post.comments is comments

    def test_deleted_post_degrades_to_empty(self, caplog):
        fake = InMemoryReddit({"sub": make_posts("p", 1)}, deleted_posts={"p000"})
        client = client_for(fake)
        post = client.search_posts("sub", "q")[0]
        with caplog.at_level("WARNING"):
            assert client.fetch_comments(post) == []
        assert post.comments == []
        assert any("p000" in rec.message for rec in caplog.records)

    def test_post_without_comments(self):
        fake = InMemoryReddit({"sub": make_posts("p", 1)})
        client = client_for(fake)
        post = client.search_posts("sub", "q")[0]
        assert client.fetch_comments(post) == []


class TestAuthModes:
    def test_anonymous_uses_public_host_without_bearer(self):
        spy = HeaderRecorder(InMemoryReddit({"sub": make_posts("p", 1)}))
        client = client_for(spy)
        client.search_posts("sub", "q")
        assert all(url.startswith("https://www.reddit.com") for _m, url, _h in spy.seen)
        assert all("Authorization" not in h for _m, _u, h in spy.seen)
        assert all(h.get("User-Agent") for _m, _u, h in spy.seen)

    def test_credentials_switch_to_oauth(self):
        spy = HeaderRecorder(InMemoryReddit({"sub": make_posts("p", 1)}))
        client = RedditClient(
            transport=spy, budget=FAST_BUDGET, client_id="cid", client_secret="sec"
        )
        client.search_posts("sub", "q")
        token_calls = [c for c in spy.seen if "access_token" in c[1]]
        assert len(token_calls) == 1
        assert token_calls[0][0] == "POST"
        assert token_calls[0][2]["Authorization"].startswith("Basic ")
        api_calls = [c for c in spy.seen if "access_token" not in c[1]]
        assert all(url.startswith("https://oauth.reddit.com") for _m, url, _h in api_calls)
        assert all(h["Authorization"] == "Bearer fake-reddit-token" for _m, _u, h in api_calls)

    def test_token_fetched_once(self):
        spy = HeaderRecorder(InMemoryReddit({"sub": make_posts("p", 5)}))
        client = RedditClient(
            transport=spy, budget=FAST_BUDGET, client_id="cid", client_secret="sec"
        )
        client.search_posts("sub", "q")
        client.search_posts("sub", "q")
        assert len([c for c in spy.seen if "access_token" in c[1]]) == 1

    def test_env_credentials_picked_up(self, monkeypatch):
        monkeypatch.setenv("REDDIT_CLIENT_ID", "envid")
        monkeypatch.setenv("REDDIT_CLIENT_SECRET", "envsec")
        spy = HeaderRecorder(InMemoryReddit({"sub": make_posts("p", 1)}))
        client = RedditClient(transport=spy, budget=FAST_BUDGET)
        client.search_posts("sub", "q")
        assert any("access_token" in url for _m, url, _h in spy.seen)

    def test_explicit_blank_overrides_env(self, monkeypatch):
        monkeypatch.setenv("REDDIT_CLIENT_ID", "envid")
        monkeypatch.setenv("REDDIT_CLIENT_SECRET", "envsec")
        spy = HeaderRecorder(InMemoryReddit({"sub": make_posts("p", 1)}))
        client = RedditClient(transport=spy, budget=FAST_BUDGET, client_id="", client_secret="")
        client.search_posts("sub", "q")
        assert not any("access_token" in url for _m, url, _h in spy.seen)
