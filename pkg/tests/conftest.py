import json
from importlib import resources

import pytest

from museit.ratelimit import RateBudget, reset_buckets

# a budget generous enough that tests never sleep on the shared bucket
FAST_BUDGET = RateBudget(permits_per_minute=600000, burst=10000)


@pytest.fixture(autouse=True)
def _fresh_rate_registry():
    reset_buckets()
    yield
    reset_buckets()


def load_fixture_entries(*names: str) -> list[dict]:
    entries: list[dict] = []
    for name in names:
        ref = resources.files("museit.data.fixtures").joinpath(name)
        entries.extend(json.loads(ref.read_text(encoding="utf-8")))
    return entries


@pytest.fixture
def demo_entries() -> list[dict]:
    return load_fixture_entries("demo_reddit.json", "demo_spotify.json")
