"""Theme, emotion, and sentiment annotation of post titles.

Classification runs through a pluggable backend interface so heavier models
can be swapped in later. The default backend is a weighted lexicon: scores
are sums of token weights per label, which keeps every annotation exactly
reproducible across machines.

Label conventions:

* sentiment: positive / neutral / negative. Opposing evidence cancels: the
  neutral score is raised to min(positive, negative), so a title with equal
  positive and negative weight lands on neutral rather than on whichever
  pole sorts first.
* emotion: anger / joy / optimism / sadness, with "unknown" when no token
  carries any emotion weight.
* theme: open vocabulary defined by the lexicon, "unclassified" when no
  evidence.

Ties between equally scored labels resolve by a fixed order: sentiment
neutral > positive > negative; emotion and theme alphabetically.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import BackendFailure, LexiconMissing, NegativeWeight, ParseError
from .reddit import RedditPost
from .textproc import tokenize

log = logging.getLogger(__name__)

TASKS = ("theme", "emotion", "sentiment")
SENTIMENT_LABELS = ("positive", "neutral", "negative")
EMOTION_LABELS = ("anger", "joy", "optimism", "sadness")

FALLBACK = {"sentiment": "neutral", "emotion": "unknown", "theme": "unclassified"}


@dataclass
class Annotation:
    post_id: str
    theme: str
    sentiment: str
    emotion: str
    scores: dict[str, dict[str, float]] = field(default_factory=dict)

    def label(self, task: str) -> str:
        return {"theme": self.theme, "sentiment": self.sentiment, "emotion": self.emotion}[task]


def fallback_annotation(post_id: str) -> Annotation:
    return Annotation(
        post_id=post_id,
        theme=FALLBACK["theme"],
        sentiment=FALLBACK["sentiment"],
        emotion=FALLBACK["emotion"],
        scores={task: {} for task in TASKS},
    )


@dataclass
class Lexicon:
    """Per-task token weights: entries[task][token][label] = weight."""

    entries: dict[str, dict[str, dict[str, float]]]

    def labels(self, task: str) -> list[str]:
        found = set()
        for weights in self.entries.get(task, {}).values():
            found.update(weights)
        return sorted(found)

    def score(self, task: str, tokens: list[str]) -> dict[str, float]:
        scores = {label: 0.0 for label in self.labels(task)}
        by_token = self.entries.get(task, {})
        for token in tokens:
            for label, weight in by_token.get(token, {}).items():
                scores[label] += weight
        return scores


def load_lexicon(path: str | Path) -> Lexicon:
    """Parse a token,task,label,weight CSV (header required, UTF-8).

    Duplicate (token, task, label) rows accumulate; negative weights are
    rejected with the offending line number.
    """
    path = Path(path)
    if not path.exists():
        raise LexiconMissing(f"lexicon file not found: {path}")
    entries: dict[str, dict[str, dict[str, float]]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["token", "task", "label", "weight"]:
            raise ParseError("expected header token,task,label,weight", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 4:
                raise ParseError(f"expected 4 fields, got {len(row)}", line=lineno)
            token, task, label, weight_s = (f.strip() for f in row)
            token = token.lower()
            if task not in TASKS:
                raise ParseError(f"unknown task {task!r}", line=lineno)
            if not token or not label:
                raise ParseError("empty token or label", line=lineno)
            try:
                weight = float(weight_s)
            except ValueError:
                raise ParseError(f"bad weight {weight_s!r}", line=lineno) from None
            if weight < 0:
                raise NegativeWeight(f"negative weight {weight}", line=lineno)
            entries.setdefault(task, {}).setdefault(token, {})
            entries[task][token][label] = entries[task][token].get(label, 0.0) + weight
    return Lexicon(entries=entries)


def default_lexicon_path() -> Path:
    return Path(str(resources.files("museit.data").joinpath("lexicon.csv")))


class ClassifierBackend:
    """Interface for annotation backends.

    Subclasses set ``name``, declare the tasks they cover, and implement
    classify(); they must be deterministic for fixed inputs and assets, and
    safe for concurrent read-only use.
    """

    name = "abstract"
    tasks: frozenset[str] = frozenset()
    emits_probabilities = False

    def classify(self, task: str, text: str) -> tuple[str, dict[str, float]]:
        raise NotImplementedError


class LexiconBackend(ClassifierBackend):
    """Deterministic sum-of-weights classifier over a lexicon file."""

    name = "lexicon"
    tasks = frozenset(TASKS)
    emits_probabilities = False

    def __init__(self, lexicon: Lexicon | None = None, path: str | Path | None = None):
        if lexicon is None:
            lexicon = load_lexicon(path if path is not None else default_lexicon_path())
        self.lexicon = lexicon

    def classify(self, task: str, text: str) -> tuple[str, dict[str, float]]:
        if task not in TASKS:
            raise ValueError(f"unknown task {task!r}")
        tokens = tokenize(text)
        scores = self.lexicon.score(task, tokens)
        if task == "sentiment":
            for label in SENTIMENT_LABELS:
                scores.setdefault(label, 0.0)
            canceled = min(scores["positive"], scores["negative"])
            scores["neutral"] = max(scores["neutral"], canceled)
        if not scores or max(scores.values()) <= 0.0:
            return FALLBACK[task], scores
        top = max(scores.values())
        tied = [label for label, s in scores.items() if s == top]
        return self._break_tie(task, tied), scores

    @staticmethod
    def _break_tie(task: str, tied: list[str]) -> str:
        if task == "sentiment":
            order = {"neutral": 0, "positive": 1, "negative": 2}
            return min(tied, key=lambda lab: order.get(lab, 99))
        return min(tied)


class CompositeBackend(ClassifierBackend):
    """Routes each task to its own backend."""

    name = "composite"
    emits_probabilities = False

    def __init__(self, routes: dict[str, ClassifierBackend]):
        self.routes = dict(routes)
        self.tasks = frozenset(self.routes)

    def classify(self, task: str, text: str) -> tuple[str, dict[str, float]]:
        return self.routes[task].classify(task, text)


def classify_sentiment(text: str, backend: ClassifierBackend) -> tuple[str, dict[str, float]]:
    return backend.classify("sentiment", text)


def classify_emotion(text: str, backend: ClassifierBackend) -> tuple[str, dict[str, float]]:
    return backend.classify("emotion", text)


def classify_theme(text: str, backend: ClassifierBackend) -> tuple[str, dict[str, float]]:
    return backend.classify("theme", text)


def annotate(post: RedditPost, backend: ClassifierBackend, use_body: bool = False) -> Annotation:
    """Annotate one post. Titles only unless use_body is switched on.

    A blank title short-circuits to the fallback labels. Backend exceptions
    are wrapped in BackendFailure carrying the post id, so callers can mark
    the row and move on.
    """
    missing = set(TASKS) - set(backend.tasks)
    if missing:
        raise ValueError(f"backend {backend.name!r} does not cover tasks: {sorted(missing)}")
    text = post.title if not use_body else f"{post.title} {post.body}"
    if not text.strip():
        return fallback_annotation(post.post_id)
    labels = {}
    scores = {}
    for task in TASKS:
        try:
            labels[task], scores[task] = backend.classify(task, text)
        except Exception as exc:
            raise BackendFailure(post.post_id, exc) from exc
    return Annotation(
        post_id=post.post_id,
        theme=labels["theme"],
        sentiment=labels["sentiment"],
        emotion=labels["emotion"],
        scores=scores,
    )


def make_backend(name: str, lexicon_path: str | Path | None = None) -> ClassifierBackend:
    """Backend factory for the annotator.backend config key."""
    if name == "lexicon":
        return LexiconBackend(path=lexicon_path)
    raise ValueError(f"unknown annotator backend {name!r}")
