"""Reference implementations used to cross-check the production code.

Everything here is deliberately written differently from the library:
plain dicts and Fractions instead of numpy arrays, character scans instead
of regexes, from-scratch recomputation instead of incremental updates.
Slow and obvious beats fast and clever for an oracle.
"""

from __future__ import annotations

import math
from fractions import Fraction

QUANTUM = 10**12


# ---------------------------------------------------------------------------
# Tokenization (character scan, no regex)


def oracle_tokenize(text: str) -> list[str]:
    tokens, current = [], []
    for ch in text.lower():
        if ch.isascii() and (ch.isdigit() or "a" <= ch <= "z"):
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    return tokens


def oracle_corpus_tokenize(text: str, stopwords=frozenset()) -> list[str]:
    return [t for t in oracle_tokenize(text) if len(t) >= 2 and t not in stopwords]


# ---------------------------------------------------------------------------
# TF-IDF over dicts


def oracle_tfidf(docs: list[list[str]]) -> tuple[list[dict[str, float]], list[str]]:
    """Raw tf*idf weights per document, plus the sorted vocabulary."""
    n = len(docs)
    vocab = sorted({t for doc in docs for t in doc})
    df = {t: sum(1 for doc in docs if t in doc) for t in vocab}
    out = []
    for doc in docs:
        weights: dict[str, float] = {}
        length = len(doc)
        if length:
            counts: dict[str, int] = {}
            for t in doc:
                counts[t] = counts.get(t, 0) + 1
            for t, count in counts.items():
                idf = math.log(n / df[t]) + 1.0
                weights[t] = (count / length) * idf
        out.append(weights)
    return out, vocab


def oracle_unit(weights: dict[str, float]) -> dict[str, float]:
    norm = math.sqrt(math.fsum(v * v for v in weights.values()))
    if norm == 0.0:
        return {}
    return {t: v / norm for t, v in weights.items()}


def oracle_embed(docs: list[list[str]]) -> tuple[list[dict[str, float]], list[str]]:
    raw, vocab = oracle_tfidf(docs)
    return [oracle_unit(w) for w in raw], vocab


def oracle_quantized_cosine(units: list[dict[str, float]]) -> list[list[int]]:
    """Quantized pairwise cosine distances; rows renormalized first, matching
    the documented recipe (so it composes with oracle_embed the same way the
    real distance function composes with the embedder)."""
    vecs = [oracle_unit(u) for u in units]
    m = len(vecs)
    dist = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            a, b = vecs[i], vecs[j]
            dot = math.fsum(a[t] * b[t] for t in a if t in b)
            d = round((1.0 - dot) * QUANTUM)
            if d < 0:
                d = 0
            dist[i][j] = dist[j][i] = d
    return dist


# ---------------------------------------------------------------------------
# Agglomeration recomputing every average from the original matrix


def oracle_agglomerate(dist: list[list[int]]):
    """Average linkage by exhaustive Fraction arithmetic.

    Returns (merges, exact_heights) in the same shape the library produces:
    merges are (low_id, high_id, float_height, new_id) with leaves 0..m-1 and
    new nodes numbered m, m+1, ...; member lists concatenate low + high.
    """
    m = len(dist)
    clusters: dict[int, list[int]] = {i: [i] for i in range(m)}
    merges = []
    heights = []
    for step in range(m - 1):
        best = None  # (Fraction avg, (low, high))
        for ida in clusters:
            for idb in clusters:
                if ida >= idb:
                    continue
                a, b = clusters[ida], clusters[idb]
                total = sum(dist[i][j] for i in a for j in b)
                avg = Fraction(total, len(a) * len(b) * QUANTUM)
                key = (avg, (min(ida, idb), max(ida, idb)))
                if best is None or key < best:
                    best = key
                    best_sum, best_count = total, len(a) * len(b)
        avg, (low, high) = best
        new_id = m + step
        merges.append((low, high, best_sum / (best_count * QUANTUM), new_id))
        heights.append(avg)
        clusters[new_id] = clusters.pop(low) + clusters.pop(high)
    return merges, heights


def oracle_default_k(heights: list[Fraction], leaf_count: int) -> int:
    if leaf_count <= 2 or len(heights) < 2:
        return 1
    gaps = [heights[i + 1] - heights[i] for i in range(len(heights) - 1)]
    biggest = max(gaps)
    if biggest == 0:
        return 1
    j = max(i for i, g in enumerate(gaps) if g == biggest)
    return leaf_count - j - 1


def oracle_clusters_at(merges, leaf_count: int, k: int) -> list[list[int]]:
    k = max(1, min(k, leaf_count))
    members = {i: [i] for i in range(leaf_count)}
    for low, high, _h, new_id in merges[: leaf_count - k]:
        members[new_id] = members.pop(low) + members.pop(high)
    return list(members.values())


# ---------------------------------------------------------------------------
# Full topic assignment over a small corpus


def oracle_assign(docs: list[list[str]], ids: list[str], k=None, min_topic_size=1):
    """Assignments and sizes by the documented rules, computed independently.

    Returns (assignments dict, sizes dict, merges, exact_heights) where the
    merges cover only the non-zero documents, in input order.
    """
    units, vocab = oracle_embed(docs)
    live = [i for i, u in enumerate(units) if u]
    assignments = {pid: -1 for pid in ids}
    dist = oracle_quantized_cosine([units[i] for i in live])
    merges, heights = oracle_agglomerate(dist)
    if k is not None:
        k_used = min(k, len(live))
    else:
        k_used = oracle_default_k(heights, len(live))
    clusters = oracle_clusters_at(merges, len(live), k_used)

    surviving = [c for c in clusters if len(c) >= min_topic_size]

    def centroid(members: list[int]) -> tuple[float, ...]:
        # mean of the embedding rows themselves (normalized once, like the
        # vectors the library averages), accumulated in member order
        acc = [0.0] * len(vocab)
        for i in members:
            unit = units[live[i]]
            for col, tok in enumerate(vocab):
                acc[col] = acc[col] + unit.get(tok, 0.0)
        return tuple(v / len(members) for v in acc)

    ordered = sorted(
        surviving,
        key=lambda c: (-len(c), centroid(c), sorted(ids[live[i]] for i in c)),
    )
    sizes = {}
    for topic_id, members in enumerate(ordered):
        sizes[topic_id] = len(members)
        for i in members:
            assignments[ids[live[i]]] = topic_id
    return assignments, sizes, merges, heights


# ---------------------------------------------------------------------------
# Class-based TF-IDF


def oracle_ctfidf(class_docs: dict[int, list[str]], top_k=10, stopwords=frozenset()):
    """Ranked keywords per class from the concatenated pseudo-documents."""
    class_tokens = {}
    for cid, titles in class_docs.items():
        tokens = []
        for title in titles:
            tokens.extend(oracle_corpus_tokenize(title, stopwords))
        if tokens:
            class_tokens[cid] = tokens
    if not class_tokens:
        return {}
    total = sum(len(t) for t in class_tokens.values())
    mean_per_class = total / len(class_tokens)
    freq: dict[str, int] = {}
    for tokens in class_tokens.values():
        for t in tokens:
            freq[t] = freq.get(t, 0) + 1
    out = {}
    for cid, tokens in class_tokens.items():
        counts: dict[str, int] = {}
        for t in tokens:
            counts[t] = counts.get(t, 0) + 1
        ranked = [(t, c * math.log(1.0 + mean_per_class / freq[t])) for t, c in counts.items()]
        ranked.sort(key=lambda tw: (-round(tw[1], 12), tw[0]))
        out[cid] = ranked[:top_k]
    return out


# ---------------------------------------------------------------------------
# URL extraction by character scan


_STOP_CHARS = set(' \t\n\r<>"[]')


def oracle_extract_urls(text: str) -> list[str]:
    urls = []
    lower = text.lower()
    pos = 0
    while True:
        h = lower.find("http", pos)
        if h == -1:
            break
        for scheme in ("https://", "http://"):
            if lower.startswith(scheme, h):
                end = h
                while end < len(text) and text[end] not in _STOP_CHARS:
                    end += 1
                candidate = text[h:end]
                # trailing punctuation: . , ; always; ) only while unbalanced
                while candidate:
                    last = candidate[-1]
                    if last in ".,;":
                        candidate = candidate[:-1]
                    elif last == ")" and candidate.count("(") < candidate.count(")"):
                        candidate = candidate[:-1]
                    else:
                        break
                if len(candidate) > len(scheme):
                    urls.append(candidate)
                pos = end
                break
        else:
            pos = h + 4
    return urls
