import json

import pytest

from museit.errors import AuthError, FixtureMiss, TransportError
from museit.testing import InMemoryReddit
from museit.transport import (
    CountingTransport,
    RecordingTransport,
    ReplayTransport,
    TransportResponse,
    canonical_url,
    raise_for_status,
)


class TestCanonicalUrl:
    def test_sorts_query_parameters(self):
        assert canonical_url("https://x.test/a?b=2&a=1") == "https://x.test/a?a=1&b=2"

    def test_merges_params_argument(self):
        url = canonical_url("https://x.test/a?z=9", params={"a": 1})
        assert url == "https://x.test/a?a=1&z=9"

    def test_lowercases_scheme_and_host_only(self):
        url = canonical_url("HTTPS://API.Example.COM/Path?Q=UpperCase")
        assert url == "https://api.example.com/Path?Q=UpperCase"

    def test_no_query(self):
        assert canonical_url("https://x.test/a") == "https://x.test/a"

    def test_stable_under_param_dict_order(self):
        a = canonical_url("https://x.test/a", params={"x": 1, "y": 2})
        b = canonical_url("https://x.test/a", params={"y": 2, "x": 1})
        assert a == b


class TestReplay:
    def entries(self):
        return [
            {
                "method": "GET",
                "url": "https://x.test/a?a=1&b=2",
                "status": 200,
                "body": {"ok": True},
            }
        ]

    def test_replays_by_canonical_key(self):
        t = ReplayTransport(self.entries())
        resp = t.request("get", "https://x.test/a?b=2", params={"a": 1})
        assert resp.status == 200
        assert resp.body == {"ok": True}

    def test_miss_raises_fixture_miss(self):
        t = ReplayTransport(self.entries())
        with pytest.raises(FixtureMiss):
            t.request("GET", "https://x.test/other")

    def test_loads_from_file(self, tmp_path):
        path = tmp_path / "fx.json"
        path.write_text(json.dumps(self.entries()), encoding="utf-8")
        t = ReplayTransport(path)
        assert t.request("GET", "https://x.test/a?a=1&b=2").status == 200


class TestRecording:
    def test_record_then_replay_round_trip(self, tmp_path):
        inner = InMemoryReddit({"music": [{"id": "p1", "title": "t", "selftext": "",
                                           "url": "u", "num_comments": 0, "created_utc": 1}]})
        rec = RecordingTransport(inner)
        live = rec.request("GET", "https://www.reddit.com/r/music/search.json",
                           params={"q": "x", "limit": 100, "restrict_sr": 1, "sort": "relevance"})
        path = tmp_path / "rec.json"
        rec.save(path)

        replay = ReplayTransport(path)
        again = replay.request("GET", "https://www.reddit.com/r/music/search.json",
                               params={"q": "x", "limit": 100, "restrict_sr": 1, "sort": "relevance"})
        assert again.status == live.status
        assert again.body == live.body

    def test_records_error_statuses_too(self, tmp_path):
        rec = RecordingTransport(InMemoryReddit({}))
        resp = rec.request("GET", "https://www.reddit.com/r/gone/search.json", params={"q": "x"})
        assert resp.status == 404
        assert rec.entries[-1]["status"] == 404


class TestCounting:
    def test_counts_and_logs(self):
        entries = [
            {"method": "GET", "url": "https://x.test/1", "status": 200, "body": {}},
            {"method": "POST", "url": "https://x.test/2", "status": 200, "body": {}},
        ]
        t = CountingTransport(inner=ReplayTransport(entries))
        t.request("GET", "https://x.test/1")
        t.request("POST", "https://x.test/2")
        assert t.calls == 2
        assert t.log == [("GET", "https://x.test/1"), ("POST", "https://x.test/2")]


class TestRaiseForStatus:
    def test_auth_errors(self):
        for status in (401, 403):
            with pytest.raises(AuthError):
                raise_for_status(TransportResponse(status, {}), "ctx")

    def test_server_errors(self):
        with pytest.raises(TransportError):
            raise_for_status(TransportResponse(500, {}), "ctx")

    def test_ok_passes(self):
        raise_for_status(TransportResponse(200, {}), "ctx")
