"""Local HTTP service exposing discovery, jobs, and visualization data.

Endpoints (JSON unless noted):

    GET  /api/subreddits?q=...                subreddit discovery
    POST /api/jobs                            start a job (JobConfig fields)
    GET  /api/jobs/{id}                       job state snapshot
    GET  /api/jobs/{id}/viz/emotion-ts        trend series (granularity=, attribute=)
    GET  /api/jobs/{id}/viz/wordcloud         top token counts
    GET  /api/jobs/{id}/viz/topics-2d         topics with keywords and 2D coords
    GET  /api/jobs/{id}/viz/dendrogram        merge list over topic centroids
    GET  /api/jobs/{id}/download              data.csv bytes
    GET  /api/jobs/{id}/posts?page=           paged result table (50 per page)

Error bodies: 400 validation problems carry {"violations": [{code, message}]},
404 {"error": "UNKNOWN_JOB"}, 409 {"error": "NOT_READY"} while results are
not available yet, 429 {"error": "BUSY"} when a job is already running (one
job at a time: everything shares one rate bucket, so queueing would only
hide the wait).

The built web UI, when present, is served statically at "/".
"""

from __future__ import annotations

import logging
import threading
from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .config import Settings
from .errors import EmptyQuery, JobFailed, MuseItError
from .orchestrator import JobConfig, JobRunner, validate
from .reddit import POST_CAP, RedditClient
from .topics import GRANULARITIES, TREND_ATTRIBUTES, temporal_series, word_frequencies

log = logging.getLogger(__name__)

PAGE_SIZE = 50


class JobRequest(BaseModel):
    query: str
    subreddits: list[str]
    include_comments: bool = False
    extract_track_metadata: bool = False
    include_comment_urls: bool = False
    only_scraping: bool = False
    timeout_s: int = 300
    permits_per_minute: int = 60
    burst: int | None = None
    output_dir: str | None = None
    post_cap: int = POST_CAP


class _Jobs:
    """Registry of started jobs; snapshots are replaced atomically."""

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict[str, dict] = {}

    def busy(self) -> bool:
        with self._lock:
            return any(
                e["state"].phase not in ("done", "failed") for e in self._entries.values()
            )

    def add(self, runner: JobRunner):
        with self._lock:
            self._entries[runner.job_id] = {"runner": runner, "state": runner.snapshot()}

    def update(self, job_id: str, state):
        with self._lock:
            self._entries[job_id]["state"] = state

    def get(self, job_id: str) -> dict | None:
        with self._lock:
            return self._entries.get(job_id)


def _not_ready() -> JSONResponse:
    return JSONResponse(status_code=409, content={"error": "NOT_READY"})


def _unknown_job() -> JSONResponse:
    return JSONResponse(status_code=404, content={"error": "UNKNOWN_JOB"})


def create_app(
    settings: Settings | None = None,
    reddit: RedditClient | None = None,
    runner_factory=None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service.

    reddit and runner_factory are injection points: tests and the bundled
    demo pass fixture-backed clients; by default live clients are built from
    the environment.
    """
    settings = settings if settings is not None else Settings()
    app = FastAPI(title="museit", docs_url=None, redoc_url=None)
    jobs = _Jobs()

    def default_runner_factory(config: JobConfig) -> JobRunner:
        return JobRunner(config, min_topic_size=settings.min_topic_size)

    make_runner = runner_factory if runner_factory is not None else default_runner_factory

    def discovery_client() -> RedditClient:
        if reddit is not None:
            return reddit
        return RedditClient(sort=settings.reddit_sort)

    @app.get("/api/subreddits")
    def discover(q: str = ""):
        try:
            refs = discovery_client().discover_subreddits(q)
        except EmptyQuery:
            return JSONResponse(
                status_code=400,
                content={"violations": [{"code": "EMPTY_QUERY", "message": "query is empty"}]},
            )
        except MuseItError as exc:
            return JSONResponse(status_code=502, content={"error": str(exc)})
        return [
            {"name": r.name, "approx_post_count": r.approx_post_count, "selected": r.selected}
            for r in refs
        ]

    @app.post("/api/jobs")
    def start_job(req: JobRequest):
        config = JobConfig(
            query=req.query,
            subreddits=req.subreddits,
            include_comments=req.include_comments,
            extract_track_metadata=req.extract_track_metadata,
            include_comment_urls=req.include_comment_urls,
            only_scraping=req.only_scraping,
            timeout_s=req.timeout_s,
            permits_per_minute=req.permits_per_minute,
            burst=req.burst,
            output_dir=req.output_dir if req.output_dir else settings.output_dir,
            post_cap=req.post_cap,
        )
        violations = validate(config)
        if violations:
            return JSONResponse(
                status_code=400,
                content={"violations": [{"code": v.code, "message": v.message} for v in violations]},
            )
        if jobs.busy():
            return JSONResponse(status_code=429, content={"error": "BUSY"})

        runner = make_runner(config)
        jobs.add(runner)

        def consume():
            try:
                for snapshot in runner.run():
                    jobs.update(runner.job_id, snapshot)
            except JobFailed:
                jobs.update(runner.job_id, runner.snapshot())
            except Exception:
                log.exception("job %s crashed", runner.job_id)
                state = runner.snapshot()
                state.phase = "failed"
                jobs.update(runner.job_id, state)

        thread = threading.Thread(target=consume, name=f"job-{runner.job_id}", daemon=True)
        thread.start()
        return {"job_id": runner.job_id}

    @app.get("/api/jobs/{job_id}")
    def job_state(job_id: str):
        entry = jobs.get(job_id)
        if entry is None:
            return _unknown_job()
        return entry["state"].to_dict()

    def _done_entry(job_id: str):
        entry = jobs.get(job_id)
        if entry is None:
            return None, _unknown_job()
        if entry["state"].phase != "done":
            return None, _not_ready()
        return entry, None

    @app.get("/api/jobs/{job_id}/viz/emotion-ts")
    def viz_trends(job_id: str, granularity: str = "monthly", attribute: str = "emotion"):
        entry, problem = _done_entry(job_id)
        if problem is not None:
            return problem
        if granularity not in GRANULARITIES or attribute not in TREND_ATTRIBUTES:
            return JSONResponse(status_code=400, content={"error": "BAD_PARAMETER"})
        runner: JobRunner = entry["runner"]
        if attribute != "volume" and not runner.annotations:
            return _not_ready()
        series = temporal_series(runner.posts, runner.annotations, granularity, attribute)
        return series.to_dict()

    @app.get("/api/jobs/{job_id}/viz/wordcloud")
    def viz_wordcloud(job_id: str):
        entry, problem = _done_entry(job_id)
        if problem is not None:
            return problem
        runner: JobRunner = entry["runner"]
        freqs = word_frequencies([p.title for p in runner.posts])
        return {"words": [{"token": token, "count": count} for token, count in freqs]}

    @app.get("/api/jobs/{job_id}/viz/topics-2d")
    def viz_topics(job_id: str):
        entry, problem = _done_entry(job_id)
        if problem is not None:
            return problem
        runner: JobRunner = entry["runner"]
        model = runner.topic_model
        if model is None:
            return _not_ready()
        out = []
        for info in model.topics:
            x, y = model.coords2d.get(info.topic_id, (0.0, 0.0))
            out.append(
                {
                    "topic_id": info.topic_id,
                    "size": info.size,
                    "keywords": [[token, score] for token, score in info.keywords],
                    "x": x,
                    "y": y,
                }
            )
        return {"topics": out, "outliers": sum(1 for t in model.assignments.values() if t == -1)}

    @app.get("/api/jobs/{job_id}/viz/dendrogram")
    def viz_dendrogram(job_id: str):
        entry, problem = _done_entry(job_id)
        if problem is not None:
            return problem
        model = entry["runner"].topic_model
        if model is None:
            return _not_ready()
        return {
            "merges": [[l, r, h, n] for l, r, h, n in model.dendrogram.merges],
            "leaves": list(model.dendrogram.leaves),
        }

    @app.get("/api/jobs/{job_id}/download")
    def download(job_id: str):
        entry, problem = _done_entry(job_id)
        if problem is not None:
            return problem
        path = entry["runner"].data_csv_path
        if path is None:
            return _not_ready()
        return FileResponse(path, media_type="text/csv", filename="data.csv")

    @app.get("/api/jobs/{job_id}/posts")
    def posts_page(job_id: str, page: int = 1):
        entry, problem = _done_entry(job_id)
        if problem is not None:
            return problem
        rows = entry["runner"].rows
        if page < 1:
            return JSONResponse(status_code=400, content={"error": "BAD_PARAMETER"})
        start = (page - 1) * PAGE_SIZE
        return {
            "page": page,
            "page_size": PAGE_SIZE,
            "total": len(rows),
            "posts": [asdict(row) for row in rows[start : start + PAGE_SIZE]],
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
