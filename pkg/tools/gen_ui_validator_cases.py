"""Dump the server validator's verdicts over the whole UI input space.

The web UI mirrors the job validation rules client-side so the launch
button can stay disabled instead of surfacing a 400 after the fact. This
script enumerates every combination the UI can express (query present or
empty, subreddits selected or not, all sixteen states of the four filter
toggles) and records the violation code list the real validator returns.
The frontend test suite replays the file against its TypeScript mirror.

Run from the repository root:

    python3 tools/gen_ui_validator_cases.py
"""

import itertools
import json
from pathlib import Path

from museit.orchestrator import JobConfig, validate

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures" / "validator_cases.json"


def main() -> None:
    cases = []
    flags = [False, True]
    for query, subs, comments, metadata, comment_urls, only_scraping in itertools.product(
        ["", "sad music"], [[], ["sadsongs"]], flags, flags, flags, flags
    ):
        config = JobConfig(
            query=query,
            subreddits=subs,
            include_comments=comments,
            extract_track_metadata=metadata,
            include_comment_urls=comment_urls,
            only_scraping=only_scraping,
        )
        cases.append(
            {
                "request": {
                    "query": query,
                    "subreddits": subs,
                    "include_comments": comments,
                    "extract_track_metadata": metadata,
                    "include_comment_urls": comment_urls,
                    "only_scraping": only_scraping,
                },
                "violation_codes": [v.code for v in validate(config)],
            }
        )
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(cases, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {len(cases)} cases to {OUT}")


if __name__ == "__main__":
    main()
