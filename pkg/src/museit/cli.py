"""Command line interface.

    museit discover "sad music"
    museit run "sad music" --subreddits sadsongs,musicsuggestions --track-metadata
    museit report ./Muse-it/jobs/<id>
    museit serve --port 8000

Exit codes: 0 success, 1 job failure (network, no posts, export error),
2 invalid arguments or config validation problems.

--fixtures makes every HTTP call replay from recorded JSON instead of the
network; the special value "demo" loads the bundled sample session so the
whole pipeline can be exercised offline.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

from .config import Settings, load_settings
from .errors import EmptyQuery, JobFailed, MuseItError, ParseError
from .orchestrator import JobConfig, JobRunner, validate
from .ratelimit import RateBudget
from .reddit import POST_CAP, RedditClient
from .tracks import SpotifyClient, TrackResolver
from .transport import HttpTransport, ReplayTransport, Transport

log = logging.getLogger(__name__)


def _load_fixtures(specs: list[str]) -> Transport:
    """Combine one or more fixture files into a single replay transport."""
    entries: list[dict] = []
    for spec in specs:
        if spec == "demo":
            for name in ("demo_reddit.json", "demo_spotify.json"):
                ref = resources.files("museit.data.fixtures").joinpath(name)
                entries.extend(json.loads(ref.read_text(encoding="utf-8")))
        else:
            entries.extend(json.loads(Path(spec).read_text(encoding="utf-8")))
    return ReplayTransport(entries)


def _build_clients(args, settings: Settings):
    """Reddit client and resolver factory honoring --fixtures."""
    budget = RateBudget(
        permits_per_minute=args.permits_per_minute or settings.permits_per_minute,
        burst=args.burst if args.burst is not None else settings.burst,
    )
    if args.fixtures:
        transport = _load_fixtures(args.fixtures)
    else:
        transport = HttpTransport()
    reddit = RedditClient(transport=transport, budget=budget, sort=settings.reddit_sort)

    def resolver_for(output_dir: str) -> TrackResolver:
        client = SpotifyClient(transport=transport)
        return TrackResolver(client, cache_root=output_dir, accept_truncated=settings.accept_truncated)

    return reddit, resolver_for


def _cmd_discover(args, settings: Settings) -> int:
    reddit, _ = _build_clients(args, settings)
    try:
        refs = reddit.discover_subreddits(args.query)
    except EmptyQuery:
        print("error: query is empty", file=sys.stderr)
        return 2
    except MuseItError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps([{"name": r.name, "approx_post_count": r.approx_post_count} for r in refs]))
    else:
        for ref in refs:
            print(f"{ref.name}\t{ref.approx_post_count}")
    return 0


def _cmd_run(args, settings: Settings) -> int:
    config = JobConfig(
        query=args.query,
        subreddits=[s for s in (args.subreddits or "").split(",") if s.strip()],
        include_comments=args.include_comments,
        extract_track_metadata=args.track_metadata,
        include_comment_urls=args.comment_urls,
        only_scraping=args.only_scraping,
        timeout_s=args.timeout_s if args.timeout_s is not None else settings.timeout_s,
        permits_per_minute=args.permits_per_minute or settings.permits_per_minute,
        burst=args.burst if args.burst is not None else settings.burst,
        output_dir=args.out or settings.output_dir,
        post_cap=args.cap,
    )
    violations = validate(config)
    if violations:
        for v in violations:
            print(f"error [{v.code}]: {v.message}", file=sys.stderr)
        return 2

    reddit, resolver_for = _build_clients(args, settings)
    resolver = resolver_for(config.output_dir) if config.extract_track_metadata else None
    runner = JobRunner(
        config,
        reddit=reddit,
        resolver=resolver,
        min_topic_size=args.min_topic_size or settings.min_topic_size,
    )
    last_phase = None
    try:
        for snapshot in runner.run():
            if snapshot.phase != last_phase:
                print(f"[{snapshot.job_id}] {snapshot.phase}", file=sys.stderr)
                last_phase = snapshot.phase
    except JobFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    state = runner.snapshot()
    c = state.counters
    print(
        f"posts={c['posts']} comments={c['comments']} links={c['links']} tracks={c['tracks']}",
        file=sys.stderr,
    )
    for warning in state.errors:
        print(f"warning: {warning}", file=sys.stderr)
    print(runner.data_csv_path)

    if args.figures:
        from .figures import render_report

        written = render_report(
            runner.rows,
            Path(runner.data_csv_path).parent,
            topic_model=runner.topic_model,
            posts=runner.posts,
            annotations=runner.annotations or None,
        )
        for path in written:
            print(path)
    return 0


def _cmd_report(args, settings: Settings) -> int:
    from .export import read_data_csv
    from .figures import render_report

    job_dir = Path(args.job_dir)
    csv_path = job_dir / "data.csv"
    if not csv_path.is_file():
        print(f"error: no data.csv under {job_dir}", file=sys.stderr)
        return 1
    try:
        rows = read_data_csv(csv_path)
    except MuseItError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    written = render_report(
        rows,
        job_dir,
        granularity=args.granularity,
        min_topic_size=settings.min_topic_size,
    )
    for path in written:
        print(path)
    return 0


def _cmd_serve(args, settings: Settings) -> int:
    import uvicorn

    from .server import create_app

    reddit = None
    runner_factory = None
    if args.fixtures:
        reddit, resolver_for = _build_clients(args, settings)

        def runner_factory(config: JobConfig) -> JobRunner:  # noqa: F811
            resolver = resolver_for(config.output_dir) if config.extract_track_metadata else None
            return JobRunner(
                config, reddit=reddit, resolver=resolver, min_topic_size=settings.min_topic_size
            )

    static = args.static
    if static is None and Path("frontend/dist").is_dir():
        static = "frontend/dist"
    app = create_app(
        settings=settings, reddit=reddit, runner_factory=runner_factory, static_dir=static
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="museit", description="Reddit music discourse retrieval and analysis")
    parser.add_argument("--config", help="path to a key = value settings file")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_transport_flags(p):
        p.add_argument("--fixtures", action="append", default=None, metavar="PATH",
                       help="replay HTTP from a recorded fixture file; 'demo' for the bundled sample")
        p.add_argument("--permits-per-minute", type=int, default=None)
        p.add_argument("--burst", type=int, default=None)

    p_discover = sub.add_parser("discover", help="find subreddits for a query")
    p_discover.add_argument("query")
    p_discover.add_argument("--json", action="store_true", help="machine readable output")
    add_transport_flags(p_discover)
    p_discover.set_defaults(func=_cmd_discover)

    p_run = sub.add_parser("run", help="run a retrieval job end to end")
    p_run.add_argument("query")
    p_run.add_argument("--subreddits", required=True, help="comma separated subreddit names")
    p_run.add_argument("--include-comments", action="store_true")
    p_run.add_argument("--track-metadata", action="store_true", help="resolve Spotify links")
    p_run.add_argument("--comment-urls", action="store_true", help="extract Spotify links from comments")
    p_run.add_argument("--only-scraping", action="store_true", help="skip annotation and clustering")
    p_run.add_argument("--timeout-s", type=int, default=None, help="per link resolution budget")
    p_run.add_argument("--cap", type=int, default=POST_CAP, help="post cap per subreddit")
    p_run.add_argument("--out", default=None, help="output directory root")
    p_run.add_argument("--min-topic-size", type=int, default=None)
    p_run.add_argument("--figures", action="store_true", help="also render report figures")
    add_transport_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_report = sub.add_parser("report", help="render figures for a finished job directory")
    p_report.add_argument("job_dir")
    p_report.add_argument("--granularity", choices=("daily", "weekly", "monthly"), default="monthly")
    p_report.set_defaults(func=_cmd_report)

    p_serve = sub.add_parser("serve", help="start the local HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--static", default=None, help="directory with the built web UI")
    add_transport_flags(p_serve)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        settings = load_settings(args.config)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return args.func(args, settings)


if __name__ == "__main__":
    sys.exit(main())
