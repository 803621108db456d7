"""Topic modeling: embeddings, clustering, keywords, trends.

The pipeline is TF-IDF embeddings, agglomerative clustering with average
linkage on cosine distances, class-based TF-IDF keywords, a dendrogram over
topic centroids, and a PCA projection of centroids to 2D. Heavier embedding
backends can be plugged in behind EmbeddingBackend without touching the
rest.

Reproducibility notes. Average-linkage merge decisions are made on integer
arithmetic: pairwise cosine distances are quantized to integers at 1e-12
resolution, and cluster-pair distance sums are maintained as exact integers
(merging clusters adds their sums, which is exact for average linkage).
Near-ties are re-compared with integer cross-multiplication, and remaining
exact ties break on the smallest (node id, node id) pair. That makes the
merge sequence a pure function of the quantized distance matrix, so repeated
runs and independent reimplementations agree step for step. For corpora of
up to 1024 documents the quantized matrix itself is computed with exactly
rounded float summation (math.fsum) over sparse rows, which is also
independent of document order; larger corpora switch to BLAS matrix products
for speed. Corpora past 4000 documents fall back to float accumulation for
the cluster sums, trading exact tie handling for memory.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from fractions import Fraction

import numpy as np

from .annotate import Annotation
from .errors import (
    CorpusTooSmall,
    DegenerateCorpus,
    MissingAnnotations,
    TooFewTopics,
)
from .reddit import RedditPost
from .textproc import corpus_tokenize, default_stopwords

QUANTUM = 10**12
_EXACT_PAIRWISE_MAX = 1024
_EXACT_SUMS_MAX = 4000

DEFAULT_MIN_TOPIC_SIZE = 5
DEFAULT_TOP_K = 10
OUTLIER_TOPIC = -1

GRANULARITIES = ("daily", "weekly", "monthly")
TREND_ATTRIBUTES = ("emotion", "sentiment", "theme", "volume")


# ---------------------------------------------------------------------------
# Embeddings


@dataclass
class DocumentEmbedding:
    post_id: str
    vector: np.ndarray
    norm: float


class EmbeddingBackend:
    """Interface: turn a list of titles into a row-per-document matrix."""

    name = "abstract"

    def embed(self, titles: list[str]) -> np.ndarray:
        raise NotImplementedError


class TfidfBackend(EmbeddingBackend):
    """TF-IDF with tf = count/len(doc), idf = ln(N/df) + 1, L2-normalized rows.

    The vocabulary is the sorted set of corpus tokens, so vector layout is a
    pure function of corpus content. Documents with no surviving tokens get
    the zero vector; downstream stages treat those as outliers.
    """

    name = "tfidf"

    def __init__(self, stopwords: frozenset[str] | None = None):
        self.stopwords = stopwords if stopwords is not None else default_stopwords()
        self.vocabulary: list[str] = []

    def raw_weights(self, titles: list[str]) -> tuple[np.ndarray, list[str]]:
        """Pre-normalization tf*idf matrix plus the vocabulary, for inspection."""
        docs = [corpus_tokenize(t, self.stopwords) for t in titles]
        vocab = sorted({tok for doc in docs for tok in doc})
        index = {tok: i for i, tok in enumerate(vocab)}
        n = len(titles)
        df = Counter()
        for doc in docs:
            df.update(set(doc))
        idf = np.zeros(len(vocab))
        for tok, i in index.items():
            idf[i] = math.log(n / df[tok]) + 1.0
        matrix = np.zeros((n, len(vocab)))
        for row, doc in enumerate(docs):
            if not doc:
                continue
            length = len(doc)
            for tok, count in Counter(doc).items():
                col = index[tok]
                matrix[row, col] = (count / length) * idf[col]
        return matrix, vocab

    def embed(self, titles: list[str]) -> np.ndarray:
        matrix, vocab = self.raw_weights(titles)
        self.vocabulary = vocab
        # fsum-based norm: the exact same scalar recipe as the distance stage,
        # so embeddings are a pure function of the counts (no summation-order
        # effects), which keeps results reproducible across platforms
        for row in range(matrix.shape[0]):
            norm = math.sqrt(math.fsum(float(v) * float(v) for v in matrix[row] if v))
            if norm > 0.0:
                matrix[row] /= norm
        return matrix


def embed_corpus(
    titles: list[str],
    backend: EmbeddingBackend | None = None,
    ids: list[str] | None = None,
) -> list[DocumentEmbedding]:
    """Embed one corpus. Requires at least two non-empty documents."""
    non_empty = sum(1 for t in titles if t and t.strip())
    if non_empty < 2:
        raise CorpusTooSmall(f"need at least 2 non-empty documents, got {non_empty}")
    if backend is None:
        backend = TfidfBackend()
    if ids is None:
        ids = [str(i) for i in range(len(titles))]
    if len(ids) != len(titles):
        raise ValueError("ids and titles length mismatch")
    matrix = backend.embed(titles)
    out = []
    for post_id, row in zip(ids, matrix):
        out.append(DocumentEmbedding(post_id=post_id, vector=row, norm=float(np.linalg.norm(row))))
    return out


# ---------------------------------------------------------------------------
# Quantized distances and exact agglomeration


def quantized_cosine_distances(vectors: np.ndarray) -> np.ndarray:
    """Pairwise cosine distances scaled by 1e12 and rounded to integers.

    Rows are renormalized here, so callers may pass raw or unit vectors.
    A zero row is treated as at distance 1 from everything.
    """
    m = vectors.shape[0]
    if m <= _EXACT_PAIRWISE_MAX:
        sparse: list[dict[int, float]] = []
        for row in vectors:
            idx = np.flatnonzero(row)
            norm = math.sqrt(math.fsum(float(row[i]) ** 2 for i in idx))
            if norm == 0.0:
                sparse.append({})
            else:
                sparse.append({int(i): float(row[i]) / norm for i in idx})
        dist = np.zeros((m, m), dtype=np.int64)
        for i in range(m):
            a = sparse[i]
            for j in range(i + 1, m):
                b = sparse[j]
                if len(b) < len(a):
                    a_small, b_big = b, a
                else:
                    a_small, b_big = a, b
                dot = math.fsum(v * b_big[k] for k, v in a_small.items() if k in b_big)
                d = round((1.0 - dot) * QUANTUM)
                if d < 0:
                    d = 0
                dist[i, j] = dist[j, i] = d
        return dist
    norms = np.linalg.norm(vectors, axis=1)
    safe = np.where(norms == 0, 1.0, norms)
    unit = vectors / safe[:, None]
    gram = unit @ unit.T
    gram[norms == 0, :] = 0.0
    gram[:, norms == 0] = 0.0
    dist = np.rint((1.0 - gram) * QUANTUM)
    dist = np.clip(dist, 0, None).astype(np.int64)
    np.fill_diagonal(dist, 0)
    return dist


def quantized_euclidean_distances(vectors: np.ndarray) -> np.ndarray:
    m = vectors.shape[0]
    dist = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        for j in range(i + 1, m):
            d = math.sqrt(math.fsum((float(x) - float(y)) ** 2 for x, y in zip(vectors[i], vectors[j])))
            dist[i, j] = dist[j, i] = round(d * QUANTUM)
    return dist


@dataclass
class Agglomeration:
    """Full merge history over m leaves (node ids: leaves 0..m-1, then m+step)."""

    leaf_count: int
    merges: list[tuple[int, int, float, int]]
    exact_heights: list[Fraction]

    def clusters_at(self, k: int) -> list[list[int]]:
        """Leaf-index clusters left after cutting the history at k clusters."""
        k = max(1, min(k, self.leaf_count))
        members: dict[int, list[int]] = {i: [i] for i in range(self.leaf_count)}
        for left, right, _height, new_id in self.merges[: self.leaf_count - k]:
            members[new_id] = members.pop(left) + members.pop(right)
        return list(members.values())


def agglomerate(dist: np.ndarray) -> Agglomeration:
    """Average-linkage agglomeration over an integer distance matrix.

    Maintains exact integer sums of cross-cluster pair distances; the average
    for a candidate pair is sum/count, compared exactly via integer
    cross-multiplication among float-prefiltered candidates. Ties break on
    the lexicographically smallest (min node id, max node id) pair. New nodes
    are numbered m, m+1, ... in merge order.
    """
    m = dist.shape[0]
    merges: list[tuple[int, int, float, int]] = []
    exact_heights: list[Fraction] = []
    if m <= 1:
        return Agglomeration(leaf_count=m, merges=merges, exact_heights=exact_heights)

    exact = m <= _EXACT_SUMS_MAX
    sums = dist.astype(np.int64 if exact else np.float64, copy=True)
    sizes = np.ones(m, dtype=np.int64)
    active = np.ones(m, dtype=bool)
    slot_ids = list(range(m))

    for step in range(m - 1):
        counts = np.outer(sizes, sizes).astype(np.float64)
        ratio = sums.astype(np.float64) / counts
        ratio[~active, :] = np.inf
        ratio[:, ~active] = np.inf
        np.fill_diagonal(ratio, np.inf)
        rmin = float(ratio.min())
        margin = rmin * 1e-9 + 1e-9
        cand = np.argwhere(ratio <= rmin + margin)

        best = None  # (sum, count, (low_id, high_id), (slot_a, slot_b))
        for si, sj in cand:
            if si >= sj:
                continue
            s_val = int(sums[si, sj])
            c_val = int(sizes[si]) * int(sizes[sj])
            ida, idb = slot_ids[si], slot_ids[sj]
            pair = (min(ida, idb), max(ida, idb))
            if best is None:
                better = True
            else:
                lhs = s_val * best[1]
                rhs = best[0] * c_val
                better = lhs < rhs or (lhs == rhs and pair < best[2])
            if better:
                best = (s_val, c_val, pair, (int(si), int(sj)))
        assert best is not None
        s_val, c_val, (low_id, high_id), (slot_a, slot_b) = best

        new_id = m + step
        merges.append((low_id, high_id, s_val / (c_val * QUANTUM), new_id))
        exact_heights.append(Fraction(s_val, c_val * QUANTUM))

        sums[slot_a, :] += sums[slot_b, :]
        sums[:, slot_a] += sums[:, slot_b]
        sums[slot_a, slot_a] = 0
        sizes[slot_a] += sizes[slot_b]
        active[slot_b] = False
        slot_ids[slot_a] = new_id

    return Agglomeration(leaf_count=m, merges=merges, exact_heights=exact_heights)


def default_cluster_count(agg: Agglomeration) -> int:
    """Pick k by the largest gap between consecutive merge heights.

    Cutting happens just before the merge that follows the largest gap; ties
    prefer the later gap (fewer clusters). A flat history (all gaps zero, or
    fewer than two merges) collapses to a single cluster.
    """
    heights = agg.exact_heights
    if agg.leaf_count <= 2 or len(heights) < 2:
        return 1
    gaps = [heights[i + 1] - heights[i] for i in range(len(heights) - 1)]
    biggest = max(gaps)
    if biggest == 0:
        return 1
    j = max(i for i, g in enumerate(gaps) if g == biggest)
    return agg.leaf_count - j - 1


# ---------------------------------------------------------------------------
# Topic assignment


@dataclass
class TopicAssignment:
    assignments: dict[str, int]
    centroids: dict[int, np.ndarray]
    sizes: dict[int, int]
    k_used: int


def assign_topics(
    embeddings: list[DocumentEmbedding],
    k: int | None = None,
    min_topic_size: int = DEFAULT_MIN_TOPIC_SIZE,
) -> TopicAssignment:
    """Cluster documents into topics; small clusters become outliers (-1).

    With k given, the merge history is cut at k clusters before the size
    filter; otherwise k comes from the largest-gap rule. Topic ids are
    assigned by descending size, then lexicographic centroid, then member
    ids, so numbering depends only on content.
    """
    if min_topic_size < 1:
        raise ValueError("min_topic_size must be >= 1")
    assignments = {e.post_id: OUTLIER_TOPIC for e in embeddings}
    live = [e for e in embeddings if e.norm > 0]
    if not live:
        raise DegenerateCorpus("all documents embedded to the zero vector")

    vectors = np.vstack([e.vector for e in live])
    agg = agglomerate(quantized_cosine_distances(vectors))
    if k is not None:
        if k < 1:
            raise ValueError("k must be >= 1")
        k_used = min(k, len(live))
    else:
        k_used = default_cluster_count(agg)
    clusters = agg.clusters_at(k_used)

    surviving = [c for c in clusters if len(c) >= min_topic_size]
    ordered = sorted(
        surviving,
        key=lambda c: (
            -len(c),
            tuple(np.mean(vectors[c], axis=0)),
            sorted(live[i].post_id for i in c),
        ),
    )
    centroids: dict[int, np.ndarray] = {}
    sizes: dict[int, int] = {}
    for topic_id, members in enumerate(ordered):
        centroids[topic_id] = np.mean(vectors[members], axis=0)
        sizes[topic_id] = len(members)
        for i in members:
            assignments[live[i].post_id] = topic_id
    return TopicAssignment(assignments=assignments, centroids=centroids, sizes=sizes, k_used=k_used)


# ---------------------------------------------------------------------------
# Keywords


def topic_keywords(
    assignments: dict[str, int],
    titles_by_id: dict[str, str],
    top_k: int = DEFAULT_TOP_K,
    stopwords: frozenset[str] | None = None,
) -> dict[int, list[tuple[str, float]]]:
    """Class-based TF-IDF keywords per topic.

    Each topic's documents form one pseudo-document; a token scores
    tf(t, c) * ln(1 + A / f(t)) with tf the raw count in the class, A the
    mean token count per class, and f(t) the token's total frequency across
    classes. Outliers are excluded. Ranking is by descending weight, ties
    alphabetical; topics with no tokens are skipped.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    class_tokens: dict[int, Counter] = {}
    for post_id, topic_id in assignments.items():
        if topic_id == OUTLIER_TOPIC:
            continue
        title = titles_by_id.get(post_id, "")
        class_tokens.setdefault(topic_id, Counter()).update(corpus_tokenize(title, stopwords))

    class_tokens = {tid: counts for tid, counts in class_tokens.items() if sum(counts.values()) > 0}
    if not class_tokens:
        return {}
    total_tokens = sum(sum(c.values()) for c in class_tokens.values())
    mean_per_class = total_tokens / len(class_tokens)
    global_freq = Counter()
    for counts in class_tokens.values():
        global_freq.update(counts)

    keywords: dict[int, list[tuple[str, float]]] = {}
    for topic_id in sorted(class_tokens):
        counts = class_tokens[topic_id]
        weighted = [
            (tok, tf * math.log(1.0 + mean_per_class / global_freq[tok]))
            for tok, tf in counts.items()
        ]
        weighted.sort(key=lambda tw: (-round(tw[1], 12), tw[0]))
        keywords[topic_id] = weighted[:top_k]
    return keywords


# ---------------------------------------------------------------------------
# Dendrogram and 2D projection


@dataclass
class Dendrogram:
    """Merge history over topic centroids.

    Node ids below len(leaves) are leaf positions; leaves[i] is the topic id
    at position i. Internal nodes are numbered len(leaves) + step.
    """

    merges: list[tuple[int, int, float, int]]
    leaves: list[int] = field(default_factory=list)


def build_dendrogram(centroids: dict[int, np.ndarray], metric: str = "cosine") -> Dendrogram:
    """Average-linkage merge list over topic centroids."""
    ids = sorted(centroids)
    if len(ids) < 2:
        raise TooFewTopics(f"dendrogram needs >= 2 topics, got {len(ids)}")
    matrix = np.vstack([centroids[i] for i in ids])
    if metric == "cosine":
        dist = quantized_cosine_distances(matrix)
    elif metric == "euclidean":
        dist = quantized_euclidean_distances(matrix)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    agg = agglomerate(dist)
    return Dendrogram(merges=agg.merges, leaves=ids)


def project_2d(centroids: dict[int, np.ndarray]) -> dict[int, tuple[float, float]]:
    """PCA of the centered centroid matrix onto its top two components.

    Sign convention: within each component, the largest-magnitude coordinate
    is made positive (earliest index wins magnitude ties). Rank-deficient
    data pads the missing axis with zeros.
    """
    ids = sorted(centroids)
    if len(ids) < 2:
        raise TooFewTopics(f"2D projection needs >= 2 topics, got {len(ids)}")
    matrix = np.vstack([centroids[i] for i in ids]).astype(np.float64)
    centered = matrix - matrix.mean(axis=0)
    u, s, _vt = np.linalg.svd(centered, full_matrices=False)
    coords = np.zeros((len(ids), 2))
    take = min(2, len(s))
    coords[:, :take] = u[:, :take] * s[:take]
    for axis in range(take):
        col = coords[:, axis]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            coords[:, axis] = -col
    return {tid: (float(coords[i, 0]), float(coords[i, 1])) for i, tid in enumerate(ids)}


# ---------------------------------------------------------------------------
# Word frequencies and temporal trends


def word_frequencies(
    titles: list[str],
    top_n: int = 100,
    stopwords: frozenset[str] | None = None,
) -> list[tuple[str, int]]:
    """Token counts over the corpus, descending, ties alphabetical."""
    if stopwords is None:
        stopwords = default_stopwords()
    counts = Counter()
    for title in titles:
        counts.update(corpus_tokenize(title, stopwords))
    ranked = sorted(counts.items(), key=lambda tc: (-tc[1], tc[0]))
    return ranked[:top_n]


@dataclass
class TrendSeries:
    granularity: str
    attribute: str
    bins: dict[str, dict[str, int]]  # ISO-8601 bin start -> label -> count

    def to_dict(self) -> dict:
        return {"granularity": self.granularity, "attribute": self.attribute, "bins": self.bins}


def _bin_start(ts: int, granularity: str):
    day = datetime.fromtimestamp(ts, tz=timezone.utc).date()
    if granularity == "daily":
        return day
    if granularity == "weekly":
        return day - timedelta(days=day.weekday())
    return day.replace(day=1)


def _next_bin(day, granularity: str):
    if granularity == "daily":
        return day + timedelta(days=1)
    if granularity == "weekly":
        return day + timedelta(days=7)
    if day.month == 12:
        return day.replace(year=day.year + 1, month=1)
    return day.replace(month=day.month + 1)


def temporal_series(
    posts: list[RedditPost],
    annotations: dict[str, Annotation] | None,
    granularity: str,
    attribute: str,
) -> TrendSeries:
    """Per-bin label counts on a continuous UTC calendar axis.

    Bins are calendar days, ISO weeks (starting Monday), or calendar months;
    empty bins between the first and last are emitted with zero counts. For
    the volume attribute every post counts under the single label "posts";
    for label attributes each annotated post counts under its label and
    unannotated posts are skipped.
    """
    if granularity not in GRANULARITIES:
        raise ValueError(f"granularity must be one of {GRANULARITIES}, got {granularity!r}")
    if attribute not in TREND_ATTRIBUTES:
        raise ValueError(f"attribute must be one of {TREND_ATTRIBUTES}, got {attribute!r}")
    if attribute != "volume" and not annotations:
        raise MissingAnnotations(f"attribute {attribute!r} needs annotations")

    hits: list[tuple[object, str]] = []
    for post in posts:
        if attribute == "volume":
            label = "posts"
        else:
            ann = annotations.get(post.post_id)
            if ann is None:
                continue
            label = ann.label(attribute)
        hits.append((_bin_start(post.created_utc, granularity), label))

    if not hits:
        return TrendSeries(granularity=granularity, attribute=attribute, bins={})

    labels = sorted({label for _day, label in hits})
    first = min(day for day, _label in hits)
    last = max(day for day, _label in hits)
    bins: dict[str, dict[str, int]] = {}
    day = first
    while day <= last:
        bins[day.isoformat()] = {label: 0 for label in labels}
        day = _next_bin(day, granularity)
    for day, label in hits:
        bins[day.isoformat()][label] += 1
    return TrendSeries(granularity=granularity, attribute=attribute, bins=bins)


# ---------------------------------------------------------------------------
# Full model


@dataclass
class TopicInfo:
    topic_id: int
    size: int
    keywords: list[tuple[str, float]]


@dataclass
class TopicModel:
    assignments: dict[str, int]
    topics: list[TopicInfo]
    dendrogram: Dendrogram
    coords2d: dict[int, tuple[float, float]]

    def to_dict(self) -> dict:
        return {
            "assignments": dict(self.assignments),
            "topics": [
                {
                    "topic_id": t.topic_id,
                    "size": t.size,
                    "keywords": [[tok, score] for tok, score in t.keywords],
                }
                for t in self.topics
            ],
            "dendrogram": {
                "merges": [[l, r, h, n] for l, r, h, n in self.dendrogram.merges],
                "leaves": list(self.dendrogram.leaves),
            },
            "coords2d": {str(tid): [x, y] for tid, (x, y) in self.coords2d.items()},
        }


def build_topic_model(
    titles_by_id: dict[str, str],
    k: int | None = None,
    min_topic_size: int = DEFAULT_MIN_TOPIC_SIZE,
    top_k: int = DEFAULT_TOP_K,
    stopwords: frozenset[str] | None = None,
    backend: EmbeddingBackend | None = None,
) -> TopicModel:
    """Run the whole topic pipeline over {post_id: title}."""
    if stopwords is None:
        stopwords = default_stopwords()
    if backend is None:
        backend = TfidfBackend(stopwords=stopwords)
    ids = list(titles_by_id)
    titles = [titles_by_id[i] for i in ids]
    embeddings = embed_corpus(titles, backend=backend, ids=ids)
    assignment = assign_topics(embeddings, k=k, min_topic_size=min_topic_size)
    keywords = topic_keywords(assignment.assignments, titles_by_id, top_k=top_k, stopwords=stopwords)

    topics = [
        TopicInfo(topic_id=tid, size=assignment.sizes[tid], keywords=keywords.get(tid, []))
        for tid in sorted(assignment.sizes)
    ]
    n_topics = len(assignment.centroids)
    if n_topics >= 2:
        dendrogram = build_dendrogram(assignment.centroids)
        coords2d = project_2d(assignment.centroids)
    elif n_topics == 1:
        only = next(iter(assignment.centroids))
        dendrogram = Dendrogram(merges=[], leaves=[only])
        coords2d = {only: (0.0, 0.0)}
    else:
        dendrogram = Dendrogram(merges=[], leaves=[])
        coords2d = {}
    return TopicModel(
        assignments=assignment.assignments,
        topics=topics,
        dendrogram=dendrogram,
        coords2d=coords2d,
    )
