"""Regenerate the bundled demo fixtures.

Runs the real clients against the in-memory fakes with a recording transport
in between, then saves the recorded exchanges. Keeping generation in one
script means the fixtures, the fakes, and the clients cannot drift apart
silently: rerun it after changing any request shape.

    python3 tools/gen_fixtures.py

Demo session: query "sad music", three subreddits (sadsongs 28 posts,
musicsuggestions 19, pianocovers 13), five Spotify links (three tracks, one
album with 3 tracks, one playlist with 4 tracks, one of the five arriving
via a comment), titles drawn from three distinct vocabularies so clustering
has structure, timestamps spread over Jan-Jun 2020.
"""

from __future__ import annotations

import random
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from museit.orchestrator import JobConfig, JobRunner
from museit.ratelimit import RateBudget, reset_buckets
from museit.reddit import RedditClient
from museit.testing import InMemoryReddit, InMemorySpotify, album_obj, artist_obj, playlist_obj, track_obj
from museit.tracks import SpotifyClient, TrackResolver
from museit.transport import RecordingTransport

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "src" / "museit" / "data" / "fixtures"

TRACK_IDS = (
    "4uLU6hMCjMI75M1A2tKUQC",
    "7ouMYWpwJ422jRcDASZB7P",
    "3n3Ppam7vgaVa1iaRUc9Lp",
)
ALBUM_ID = "1DFixLWuPkv3KT3TnV35m3"
PLAYLIST_ID = "37i9dQZF1DXcBWIGoYBM5M"

BASE_TS = 1577880000  # 2020-01-01 12:00:00 UTC
STEP_S = 233280  # 2.7 days; 60 posts reach early June

FAMILIES = {
    "piano": ["sad", "piano", "slow", "rain", "melancholy", "ballad", "quiet", "minor", "nocturne", "keys"],
    "dance": ["dance", "party", "upbeat", "pop", "energy", "beat", "club", "anthem", "summer", "happy"],
    "rock": ["guitar", "rock", "cover", "band", "live", "acoustic", "riff", "solo", "amp", "loud"],
}
GLUE = ["songs", "music", "tracks", "recommendations", "favorites", "playlist"]

# per subreddit: (family, how many)
SUBREDDIT_PLAN = {
    "sadsongs": [("piano", 18), ("rock", 10)],
    "musicsuggestions": [("dance", 14), ("piano", 5)],
    "pianocovers": [("rock", 6), ("piano", 7)],
}

BODIES = [
    "what are you all listening to lately",
    "looking for something that fits this mood, thanks in advance",
    "been on repeat all week, cannot stop",
    "my therapist said to make a list so here we are",
    "open to anything, old or new",
]

# the five demo links: four in post bodies, one in a comment
LINK_BODIES = {
    ("sadsongs", 0): f"this one wrecks me every time https://open.spotify.com/track/{TRACK_IDS[0]} truly",
    ("sadsongs", 3): f"whole album is great: [here](https://open.spotify.com/album/{ALBUM_ID}) worth a listen",
    ("musicsuggestions", 1): f"start with https://open.spotify.com/intl-de/track/{TRACK_IDS[1]}.",
    ("pianocovers", 2): f"see https://open.spotify.com/track/{TRACK_IDS[2]}?si=abc123xyz and https://example.com/blog/covers",
}
COMMENT_LINK = f"made a playlist for exactly this https://open.spotify.com/playlist/{PLAYLIST_ID}?si=xyz987 enjoy"


def build_posts() -> dict[str, list[dict]]:
    rng = random.Random(20200101)
    subreddits: dict[str, list[dict]] = {}
    order: list[tuple[str, int]] = []
    for name, plan in SUBREDDIT_PLAN.items():
        posts = []
        idx = 0
        for family, count in plan:
            words = FAMILIES[family]
            for _ in range(count):
                picked = rng.sample(words, 3)
                title = f"{picked[0]} {picked[1]} {picked[2]} {rng.choice(GLUE)}"
                body = rng.choice(BODIES)
                key = (name, idx)
                if key in LINK_BODIES:
                    body = LINK_BODIES[key]
                post_id = f"{name[:2]}{idx:03d}"
                posts.append(
                    {
                        "id": post_id,
                        "title": title,
                        "selftext": body,
                        "url": f"https://www.reddit.com/r/{name}/comments/{post_id}/thread/",
                        "num_comments": 0,
                        "created_utc": 0,  # assigned globally below
                    }
                )
                idx += 1
        subreddits[name] = posts
        order.extend((name, i) for i in range(len(posts)))
    rng.shuffle(order)
    for slot, (name, i) in enumerate(order):
        subreddits[name][i]["created_utc"] = BASE_TS + slot * STEP_S
    return subreddits


def build_comments(subreddits: dict[str, list[dict]]) -> dict[str, list[dict]]:
    comments: dict[str, list[dict]] = {}
    texts = [
        "seconding this so hard",
        "saved, thank you",
        "this thread delivers every time",
        "adding these to my library now",
    ]
    rng = random.Random(42)
    chosen = []
    for name, posts in sorted(subreddits.items()):
        chosen.extend((name, p) for p in posts[:4])
    for n, (name, post) in enumerate(chosen):
        ts = post["created_utc"] + 3600
        tree = [{"id": f"c{n}a", "body": rng.choice(texts), "created_utc": ts}]
        if n == 1:
            tree.append(
                {
                    "id": f"c{n}b",
                    "body": COMMENT_LINK,
                    "created_utc": ts + 60,
                    "replies": [{"id": f"c{n}c", "body": "legend, thanks", "created_utc": ts + 120}],
                }
            )
        comments[post["id"]] = tree
        post["num_comments"] = sum(1 for _ in _walk(tree))
    return comments


def _walk(tree):
    for node in tree:
        yield node
        yield from _walk(node.get("replies") or [])


def build_spotify() -> InMemorySpotify:
    artists = {
        "ar01": artist_obj("ar01", "Gray Harbor", ["ambient", "neoclassical"]),
        "ar02": artist_obj("ar02", "The Night Bus", ["synthpop"]),
        "ar03": artist_obj("ar03", "Marta Keys", ["piano", "instrumental"]),
        "ar04": artist_obj("ar04", "Copper Veins", ["indie rock"]),
        "ar05": artist_obj("ar05", "DJ Meridian", ["dance", "house"]),
    }
    tracks = {
        TRACK_IDS[0]: track_obj(TRACK_IDS[0], "Rain on the Keys", [("ar03", "Marta Keys")],
                                album_name="Quiet Hours", release_date="2019-11-08"),
        TRACK_IDS[1]: track_obj(TRACK_IDS[1], "Neon Weekend", [("ar02", "The Night Bus"), ("ar05", "DJ Meridian")],
                                album_name="City Lights", release_date="2020-02-14", explicit=True, popularity=71),
        TRACK_IDS[2]: track_obj(TRACK_IDS[2], "Wires Down", [("ar04", "Copper Veins")],
                                album_name="Basement Tapes", release_date="2018-06-01", popularity=44),
    }
    album_tracks = [
        track_obj("0aTrack0000000000001A", "Harbor Light", [("ar01", "Gray Harbor")], album_name=None, duration_ms=241000),
        track_obj("0aTrack0000000000002B", "Low Tide", [("ar01", "Gray Harbor")], album_name=None, duration_ms=198000),
        track_obj("0aTrack0000000000003C", "Fog Bank", [("ar01", "Gray Harbor"), ("ar03", "Marta Keys")], album_name=None, duration_ms=305000),
    ]
    playlist_tracks = [
        tracks[TRACK_IDS[0]],
        track_obj("0pTrack0000000000001D", "Slow Orbit", [("ar01", "Gray Harbor")], album_name="Harbor", release_date="2017-03-10"),
        track_obj("0pTrack0000000000002E", "Glass Piano", [("ar03", "Marta Keys")], album_name="Quiet Hours", release_date="2019-11-08"),
        track_obj("0pTrack0000000000003F", "Last Call", [("ar02", "The Night Bus")], album_name="City Lights", release_date="2020-02-14"),
    ]
    return InMemorySpotify(
        tracks=tracks,
        albums={ALBUM_ID: album_obj(ALBUM_ID, "Quiet Hours", album_tracks, release_date="2019-11-08",
                                    label="Driftwood Records", copyrights=("2019 Driftwood Records",))},
        playlists={PLAYLIST_ID: playlist_obj(PLAYLIST_ID, "rainy day rotation", playlist_tracks)},
        artists=artists,
    )


def main() -> int:
    reset_buckets()
    subreddits = build_posts()
    comments = build_comments(subreddits)
    total = sum(len(p) for p in subreddits.values())
    assert total == 60, total

    reddit_rec = RecordingTransport(InMemoryReddit(subreddits, comments=comments))
    budget = RateBudget(permits_per_minute=600000, burst=10000)
    reddit = RedditClient(transport=reddit_rec, budget=budget)

    for query in ("sad music", "traurige Musik"):
        refs = reddit.discover_subreddits(query)
        print(query, "->", [(r.name, r.approx_post_count) for r in refs])

    spotify_rec = RecordingTransport(build_spotify())
    with tempfile.TemporaryDirectory() as tmp:
        resolver = TrackResolver(SpotifyClient(transport=spotify_rec), cache_root=tmp)
        config = JobConfig(
            query="sad music",
            subreddits=["sadsongs", "musicsuggestions", "pianocovers"],
            include_comments=True,
            include_comment_urls=True,
            extract_track_metadata=True,
            output_dir=tmp,
            permits_per_minute=600000,
            burst=10000,
        )
        runner = JobRunner(config, reddit=reddit, resolver=resolver)
        for snapshot in runner.run():
            pass
        state = runner.snapshot()
        print("phase:", state.phase, "counters:", state.counters)
        assert state.phase == "done", state.phase
        assert state.counters["posts"] == 60, state.counters
        assert state.counters["links"] == 5, state.counters

    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    reddit_rec.save(FIXTURE_DIR / "demo_reddit.json")
    spotify_rec.save(FIXTURE_DIR / "demo_spotify.json")
    print("wrote", len(reddit_rec.entries), "reddit entries,", len(spotify_rec.entries), "spotify entries")
    return 0


if __name__ == "__main__":
    sys.exit(main())
