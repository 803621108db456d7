"""Startup configuration: a flat key=value file.

Example:

    # museit.conf
    timeout_s = 300
    rate.permits_per_minute = 60
    output_dir = ./Muse-it
    annotator.backend = lexicon
    cache.accept_truncated = false
    reddit.sort = relevance

CLI flags and HTTP job fields override these per job. Unknown keys are
rejected so typos fail loudly at startup instead of silently running with
defaults.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError

DEFAULT_OUTPUT_DIR = "./Muse-it"


@dataclass
class Settings:
    timeout_s: int = 300
    permits_per_minute: int = 60
    burst: int | None = None
    output_dir: str = DEFAULT_OUTPUT_DIR
    annotator_backend: str = "lexicon"
    accept_truncated: bool = False
    reddit_sort: str = "relevance"
    min_topic_size: int = 5


_KEYS = {
    "timeout_s": ("timeout_s", int),
    "rate.permits_per_minute": ("permits_per_minute", int),
    "rate.burst": ("burst", int),
    "output_dir": ("output_dir", str),
    "annotator.backend": ("annotator_backend", str),
    "cache.accept_truncated": ("accept_truncated", None),  # bool, parsed below
    "reddit.sort": ("reddit_sort", str),
    "min_topic_size": ("min_topic_size", int),
}

_TRUE = {"true", "yes", "1", "on"}
_FALSE = {"false", "no", "0", "off"}


def _parse_bool(raw: str, key: str, lineno: int) -> bool:
    low = raw.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ParseError(f"{key}: expected a boolean, got {raw!r}", line=lineno)


def load_settings(path: str | Path | None) -> Settings:
    """Load settings from a config file; None or a missing path gives defaults."""
    settings = Settings()
    if path is None:
        return settings
    path = Path(path)
    if not path.exists():
        return settings
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError(f"expected key = value, got {stripped!r}", line=lineno)
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _KEYS:
            raise ParseError(f"unknown config key {key!r}", line=lineno)
        attr, kind = _KEYS[key]
        if kind is None:
            value = _parse_bool(raw, key, lineno)
        elif kind is int:
            try:
                value = int(raw)
            except ValueError:
                raise ParseError(f"{key}: expected an integer, got {raw!r}", line=lineno) from None
        else:
            value = raw
        setattr(settings, attr, value)
    return settings
