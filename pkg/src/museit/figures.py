"""Figure rendering for finished jobs.

Figures are only produced through the report path (``museit report`` or
``museit run --figures``); a plain job writes data.csv and nothing else.
All rendering uses the Agg backend so it works headless.

The word cloud is a simple spiral packer over estimated text boxes rather
than a dependency: counts map to font sizes, words walk outward from the
center until their box stops overlapping the ones already placed.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .annotate import Annotation  # noqa: E402
from .topics import TopicModel, TrendSeries, build_topic_model, temporal_series, word_frequencies  # noqa: E402

log = logging.getLogger(__name__)

FIGURE_NAMES = ("trends.png", "wordcloud.png", "topics_2d.png", "dendrogram.png")

_CLOUD_COLORS = ("#1b6ca8", "#c44536", "#3a7d44", "#7d53a2", "#b8860b", "#2f4858")


def render_trends(series: TrendSeries, path: Path) -> None:
    """Line chart with one series per label over the binned timeline."""
    from datetime import date

    fig, ax = plt.subplots(figsize=(9, 4.5))
    keys = sorted(series.bins)
    days = [date.fromisoformat(k) for k in keys]
    labels = sorted({label for counts in series.bins.values() for label in counts})
    for label in labels:
        ax.plot(days, [series.bins[k].get(label, 0) for k in keys], marker="o", markersize=3, label=label)
    ax.set_title(f"{series.attribute} over time ({series.granularity})")
    ax.set_ylabel("posts")
    ax.grid(True, alpha=0.3)
    if labels:
        ax.legend(loc="upper left", fontsize="small")
    fig.autofmt_xdate(rotation=45)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _boxes_overlap(a, b) -> bool:
    return not (a[2] <= b[0] or b[2] <= a[0] or a[3] <= b[1] or b[3] <= a[1])


def render_wordcloud(freqs: list[tuple[str, int]], path: Path, max_words: int = 60) -> None:
    """Greedy spiral placement of the most frequent tokens."""
    fig, ax = plt.subplots(figsize=(9, 6))
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.axis("off")
    words = freqs[:max_words]
    if words:
        top = words[0][1]
        placed: list[tuple[float, float, float, float]] = []
        for rank, (token, count) in enumerate(words):
            size = 10 + 34 * math.sqrt(count / top)
            # crude glyph box estimate in axes fraction (figure is 9x6 inches)
            w = 0.6 * size * len(token) / (9 * 72)
            h = 1.2 * size / (6 * 72)
            angle, radius = 0.0, 0.0
            x = y = 0.5
            for _ in range(2000):
                x = 0.5 + radius * math.cos(angle) - w / 2
                y = 0.5 + radius * math.sin(angle) * 0.7 - h / 2
                box = (x, y, x + w, y + h)
                if all(not _boxes_overlap(box, other) for other in placed):
                    break
                angle += 0.35
                radius += 0.0015
            placed.append((x, y, x + w, y + h))
            ax.text(
                x + w / 2,
                y + h / 2,
                token,
                fontsize=size,
                ha="center",
                va="center",
                color=_CLOUD_COLORS[rank % len(_CLOUD_COLORS)],
            )
    ax.set_title("title words")
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_topics_scatter(model: TopicModel, path: Path) -> None:
    """Topics in the 2D projection, sized by member count, labeled by keywords."""
    fig, ax = plt.subplots(figsize=(8, 6))
    for info in model.topics:
        x, y = model.coords2d.get(info.topic_id, (0.0, 0.0))
        ax.scatter([x], [y], s=80 + 30 * info.size, alpha=0.6)
        label = ", ".join(token for token, _ in info.keywords[:3])
        ax.annotate(f"{info.topic_id}: {label}", (x, y), fontsize=8, ha="center", va="bottom")
    ax.set_title("topics (2D projection)")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_dendrogram(model: TopicModel, path: Path) -> None:
    """Merge tree over topic centroids via scipy's dendrogram renderer."""
    from scipy.cluster.hierarchy import dendrogram as scipy_dendrogram

    merges = model.dendrogram.merges
    leaves = model.dendrogram.leaves
    fig, ax = plt.subplots(figsize=(8, 5))
    if merges:
        sizes: dict[int, int] = {i: 1 for i in range(len(leaves))}
        rows = []
        for left, right, height, new_id in merges:
            sizes[new_id] = sizes[left] + sizes[right]
            rows.append([float(left), float(right), float(height), float(sizes[new_id])])
        linkage = np.array(rows, dtype=np.float64)
        scipy_dendrogram(
            linkage,
            ax=ax,
            labels=[f"topic {t}" for t in leaves],
            leaf_rotation=45,
        )
        ax.set_ylabel("merge distance")
    else:
        ax.text(0.5, 0.5, "fewer than two topics", ha="center", va="center")
        ax.axis("off")
    ax.set_title("topic dendrogram")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report(
    rows,
    out_dir: str | Path,
    topic_model: TopicModel | None = None,
    posts=None,
    annotations: dict[str, Annotation] | None = None,
    granularity: str = "monthly",
    min_topic_size: int = 5,
) -> list[Path]:
    """Write the standard figure set next to a job's data.csv.

    Works either from live pipeline artifacts (posts, annotations, model)
    or from exported rows alone, in which case annotations are read back
    from the row labels and the topic model is recomputed from titles
    (the computation is deterministic, so this matches the original run).
    Returns the paths written.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if posts is None:
        from types import SimpleNamespace

        posts = [
            SimpleNamespace(post_id=r.reddit_post_id, created_utc=r.created_utc) for r in rows
        ]
    annotated = [r for r in rows if getattr(r, "emotion", None)]
    if annotations is None and annotated:
        annotations = {
            r.reddit_post_id: Annotation(
                post_id=r.reddit_post_id,
                theme=r.theme or "unclassified",
                sentiment=r.sentiment or "neutral",
                emotion=r.emotion or "unknown",
                scores={},
            )
            for r in annotated
        }

    attribute = "emotion" if annotations else "volume"
    series = temporal_series(posts, annotations or {}, granularity, attribute)
    trends_path = out / "trends.png"
    render_trends(series, trends_path)
    written.append(trends_path)

    titles = [r.title for r in rows]
    cloud_path = out / "wordcloud.png"
    render_wordcloud(word_frequencies(titles), cloud_path)
    written.append(cloud_path)

    if topic_model is None:
        titles_by_id = {r.reddit_post_id: r.title for r in rows}
        try:
            topic_model = build_topic_model(titles_by_id, min_topic_size=min_topic_size)
        except Exception as exc:
            log.warning("topic figures skipped: %s", exc)
            topic_model = None
    if topic_model is not None and topic_model.topics:
        scatter_path = out / "topics_2d.png"
        render_topics_scatter(topic_model, scatter_path)
        written.append(scatter_path)
        dendro_path = out / "dendrogram.png"
        render_dendrogram(topic_model, dendro_path)
        written.append(dendro_path)

    return written
