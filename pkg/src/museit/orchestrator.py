"""Job validation and the five-stage pipeline runner.

A job is: retrieve posts (and optionally comments) from the selected
subreddits, harvest links, annotate titles and build the topic model (both
skipped in scrape-only mode), resolve Spotify links to track metadata (when
enabled), and export data.csv. Per-item failures (one subreddit erroring,
one post's classifier hiccup, one URL timing out) are recorded as warnings
and never abort the job; auth failures and disk errors are fatal.

JobRunner.run() is a generator of JobState snapshots so both the CLI and
the HTTP service can report progress from the same source. Snapshots are
deep copies: callers may hold them across phases.
"""

from __future__ import annotations

import copy
import logging
import uuid
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

from .annotate import (
    Annotation,
    ClassifierBackend,
    LexiconBackend,
    annotate,
    fallback_annotation,
)
from .errors import (
    AuthError,
    BackendFailure,
    CorpusTooSmall,
    DegenerateCorpus,
    JobFailed,
    SubredditNotFound,
    TransportError,
)
from .export import COMMENT_SEPARATOR, DataRow, write_data_csv
from .links import ExtractedLinks, SpotifyLink, extract_for_post
from .ratelimit import RateBudget
from .reddit import POST_CAP, RedditClient, RedditPost
from .topics import TopicModel, build_topic_model
from .tracks import CollectionMetadata, ResolutionResult, SpotifyClient, TrackResolver

log = logging.getLogger(__name__)

PHASES = (
    "discovering",
    "retrieving",
    "annotating",
    "clustering",
    "resolving_tracks",
    "exporting",
    "done",
    "failed",
)

# Validation codes (machine-readable, stable across CLI and HTTP).
EMPTY_QUERY = "EMPTY_QUERY"
NO_SUBREDDITS = "NO_SUBREDDITS"
DEPENDS_ON_COMMENTS = "DEPENDS_ON_COMMENTS"
DEPENDS_ON_TRACK_METADATA = "DEPENDS_ON_TRACK_METADATA"
BAD_TIMEOUT = "BAD_TIMEOUT"
BAD_RATE = "BAD_RATE"
BAD_CAP = "BAD_CAP"


@dataclass
class JobConfig:
    query: str
    subreddits: list[str]
    include_comments: bool = False
    extract_track_metadata: bool = False
    include_comment_urls: bool = False
    only_scraping: bool = False
    timeout_s: int = 300
    permits_per_minute: int = 60
    burst: int | None = None
    output_dir: str = "./Muse-it"
    post_cap: int = POST_CAP


@dataclass
class Violation:
    code: str
    message: str


def validate(config: JobConfig) -> list[Violation]:
    """Check a config; an empty list means the job may run.

    The comment-URL option only makes sense when comments are retrieved and
    track metadata extraction is on; both prerequisites are reported
    independently so a UI can explain exactly what is missing.
    """
    violations = []
    if not config.query or not config.query.strip():
        violations.append(Violation(EMPTY_QUERY, "query is empty"))
    if not config.subreddits:
        violations.append(Violation(NO_SUBREDDITS, "no subreddits selected"))
    if config.include_comment_urls and not config.include_comments:
        violations.append(
            Violation(DEPENDS_ON_COMMENTS, "comment URLs require retrieving comments")
        )
    if config.include_comment_urls and not config.extract_track_metadata:
        violations.append(
            Violation(
                DEPENDS_ON_TRACK_METADATA,
                "comment URLs require track metadata extraction",
            )
        )
    if config.timeout_s <= 0:
        violations.append(Violation(BAD_TIMEOUT, "timeout_s must be positive"))
    if config.permits_per_minute < 1 or (config.burst is not None and config.burst < 1):
        violations.append(Violation(BAD_RATE, "rate budget values must be >= 1"))
    if not 1 <= config.post_cap <= POST_CAP:
        violations.append(Violation(BAD_CAP, f"post cap must be in 1..{POST_CAP}"))
    return violations


@dataclass
class JobState:
    job_id: str
    phase: str = "retrieving"
    progress: dict[str, float] = field(default_factory=dict)
    counters: dict[str, int] = field(
        default_factory=lambda: {"posts": 0, "comments": 0, "links": 0, "tracks": 0}
    )
    errors: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "phase": self.phase,
            "progress": dict(self.progress),
            "counters": dict(self.counters),
            "errors": list(self.errors),
        }


def make_job_id() -> str:
    return uuid.uuid4().hex[:12]


class JobRunner:
    """Executes one job; exposes artifacts for viz endpoints afterwards."""

    def __init__(
        self,
        config: JobConfig,
        reddit: RedditClient | None = None,
        resolver: TrackResolver | None = None,
        backend: ClassifierBackend | None = None,
        min_topic_size: int = 5,
        job_id: str | None = None,
    ):
        self.config = config
        self.job_id = job_id if job_id is not None else make_job_id()
        budget = RateBudget(permits_per_minute=config.permits_per_minute, burst=config.burst)
        self.reddit = reddit if reddit is not None else RedditClient(budget=budget)
        self.resolver = resolver
        self.backend = backend
        self.min_topic_size = min_topic_size

        self._state = JobState(job_id=self.job_id)
        # Artifacts kept for the service's viz/table endpoints.
        self.posts: list[RedditPost] = []
        self.links_by_post: dict[str, ExtractedLinks] = {}
        self.annotations: dict[str, Annotation] = {}
        self.topic_model: TopicModel | None = None
        self.resolutions: list[ResolutionResult] = []
        self.rows: list[DataRow] = []
        self.data_csv_path: Path | None = None

    # -- state plumbing ----------------------------------------------------

    def snapshot(self) -> JobState:
        return copy.deepcopy(self._state)

    def _enter(self, phase: str):
        self._state.phase = phase
        self._state.progress.setdefault(phase, 0.0)

    def _progress(self, phase: str, fraction: float):
        current = self._state.progress.get(phase, 0.0)
        self._state.progress[phase] = max(current, min(1.0, fraction))

    def _warn(self, message: str):
        log.warning("%s", message)
        self._state.errors.append(message)

    @property
    def job_dir(self) -> Path:
        return Path(self.config.output_dir) / "jobs" / self.job_id

    # -- pipeline ------------------------------------------------------------

    def run(self):
        """Generator of JobState snapshots; raises JobFailed on fatal errors."""
        try:
            yield from self._pipeline()
        except JobFailed as exc:
            self._state.phase = "failed"
            self._state.errors.append(str(exc))
            yield self.snapshot()
            raise

    def _pipeline(self):
        config = self.config
        violations = validate(config)
        if violations:
            raise JobFailed("; ".join(f"{v.code}: {v.message}" for v in violations))

        # Retrieval.
        self._enter("retrieving")
        yield self.snapshot()
        want_comments = config.include_comments
        for done, name in enumerate(config.subreddits):
            try:
                found = self.reddit.search_posts(name, config.query, cap=config.post_cap)
            except AuthError as exc:
                raise JobFailed(f"authentication failed: {exc}") from exc
            except (SubredditNotFound, TransportError) as exc:
                self._warn(f"r/{name}: {exc}")
                found = []
            if want_comments:
                for post in found:
                    try:
                        self.reddit.fetch_comments(post)
                    except AuthError as exc:
                        raise JobFailed(f"authentication failed: {exc}") from exc
                    except TransportError as exc:
                        self._warn(f"comments for {post.post_id}: {exc}")
                        post.comments = []
            self.posts.extend(found)
            self._state.counters["posts"] = len(self.posts)
            self._state.counters["comments"] = sum(len(p.comments or []) for p in self.posts)
            self._progress("retrieving", (done + 1) / len(config.subreddits))
            yield self.snapshot()
        if not self.posts:
            raise JobFailed("no posts retrieved from any subreddit")

        # Link harvest (cheap, still part of retrieval from the outside).
        for post in self.posts:
            self.links_by_post[post.post_id] = extract_for_post(post)
        self._state.counters["links"] = sum(
            len(e.spotify_urls) + len(e.comment_spotify_urls) for e in self.links_by_post.values()
        )
        yield self.snapshot()

        # Annotation and topic modeling, unless this is a scrape-only job.
        if not config.only_scraping:
            self._enter("annotating")
            backend = self.backend if self.backend is not None else LexiconBackend()
            self.backend = backend
            for i, post in enumerate(self.posts):
                try:
                    self.annotations[post.post_id] = annotate(post, backend)
                except BackendFailure as exc:
                    self._warn(str(exc))
                    self.annotations[post.post_id] = fallback_annotation(post.post_id)
                if (i + 1) % 50 == 0:
                    self._progress("annotating", (i + 1) / len(self.posts))
                    yield self.snapshot()
            self._progress("annotating", 1.0)
            yield self.snapshot()

            self._enter("clustering")
            yield self.snapshot()
            titles = {p.post_id: p.title for p in self.posts}
            try:
                self.topic_model = build_topic_model(titles, min_topic_size=self.min_topic_size)
            except (CorpusTooSmall, DegenerateCorpus) as exc:
                self._warn(f"topic modeling skipped: {exc}")
                self.topic_model = None
            self._progress("clustering", 1.0)
            yield self.snapshot()

        # Track metadata resolution.
        if config.extract_track_metadata:
            self._enter("resolving_tracks")
            yield self.snapshot()
            links = self._links_to_resolve()
            if links:
                resolver = self._make_resolver()
                unique: dict[str, SpotifyLink] = {}
                for link in links:
                    unique.setdefault(link.uri, link)
                by_uri: dict[str, ResolutionResult] = {}
                with ThreadPoolExecutor(max_workers=2) as pool:
                    futures = {
                        pool.submit(resolver.resolve, link, config.timeout_s): uri
                        for uri, link in unique.items()
                    }
                    finished = 0
                    for future in as_completed(futures):
                        result = future.result()
                        by_uri[result.uri] = result
                        finished += 1
                        if isinstance(result.payload, CollectionMetadata):
                            self._state.counters["tracks"] += len(result.payload.tracks)
                        elif result.payload is not None:
                            self._state.counters["tracks"] += 1
                        if result.status in ("error", "not_found", "timed_out"):
                            self._warn(f"{result.uri}: {result.status}")
                        self._progress("resolving_tracks", finished / len(unique))
                        yield self.snapshot()
                self.resolutions = [by_uri[link.uri] for link in links]
            self._progress("resolving_tracks", 1.0)
            yield self.snapshot()

        # Export.
        self._enter("exporting")
        yield self.snapshot()
        self.rows = [self._row_for(post) for post in self.posts]
        try:
            self.data_csv_path = write_data_csv(
                self.rows,
                self.job_dir,
                include_comments=config.include_comments,
                only_scraping=config.only_scraping,
            )
        except OSError as exc:
            raise JobFailed(f"could not write data.csv: {exc}") from exc
        self._progress("exporting", 1.0)
        self._enter("done")
        self._progress("done", 1.0)
        log.info("job %s done: %s", self.job_id, self.data_csv_path)
        yield self.snapshot()

    # -- helpers ---------------------------------------------------------

    def _make_resolver(self) -> TrackResolver:
        if self.resolver is not None:
            return self.resolver
        self.resolver = TrackResolver(
            client=SpotifyClient(), cache_root=self.config.output_dir
        )
        return self.resolver

    def _links_to_resolve(self) -> list[SpotifyLink]:
        links: list[SpotifyLink] = []
        for post in self.posts:
            extracted = self.links_by_post[post.post_id]
            links.extend(extracted.spotify_urls)
            if self.config.include_comment_urls:
                links.extend(extracted.comment_spotify_urls)
        return links

    def _row_for(self, post: RedditPost) -> DataRow:
        extracted = self.links_by_post[post.post_id]
        row = DataRow(
            reddit_post_id=post.post_id,
            subreddit=post.subreddit,
            title=post.title,
            post_body=post.body,
            post_url=post.post_url,
            created_utc=post.created_utc,
            num_comments=post.num_comments,
            urls=list(extracted.all_urls),
            spotify_urls=[link.canonical_url for link in extracted.spotify_urls],
        )
        if self.config.include_comments:
            row.comments = [
                c.body.replace(COMMENT_SEPARATOR, "\n- - -\n")
                for c in (post.comments or [])
                if c.body
            ]
            row.comment_spotify_urls = [
                link.canonical_url for link in extracted.comment_spotify_urls
            ]
        if not self.config.only_scraping:
            annotation = self.annotations.get(post.post_id) or fallback_annotation(post.post_id)
            row.theme = annotation.theme
            row.sentiment = annotation.sentiment
            row.emotion = annotation.emotion
            if self.topic_model is not None:
                row.topic_id = self.topic_model.assignments.get(post.post_id, -1)
            else:
                row.topic_id = -1
        return row


def run_job(config: JobConfig, **kwargs) -> tuple[JobState, JobRunner]:
    """Run a job to completion, returning the final state and the runner."""
    runner = JobRunner(config, **kwargs)
    state = runner.snapshot()
    for state in runner.run():
        pass
    return state, runner
