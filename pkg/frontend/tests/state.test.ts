// Pure state semantics: toggle behavior, the filter dependency rule, and
// agreement between the client-side validator mirror and the recorded
// verdicts of the server's validator.

import { describe, expect, it } from "vitest";

import type { JobRequestBody } from "../src/api.js";
import {
    DEPENDS_ON_COMMENTS,
    DEPENDS_ON_TRACK_METADATA,
    UiState,
    buildJobRequest,
    canLaunch,
    initialState,
    loadSuggestions,
    selectAllSubreddits,
    setFilter,
    setQuery,
    toggleSubreddit,
    validateJobRequest,
} from "../src/state.js";

import serverCases from "./fixtures/validator_cases.json";

interface ServerCase {
    request: JobRequestBody;
    violation_codes: string[];
}

const CASES = serverCases as ServerCase[];

function withSubreddits(names: string[]): UiState {
    return loadSuggestions(initialState(), names.map((name) => ({
        name,
        approx_post_count: 10,
        selected: false,
    })));
}

describe("subreddit toggles", () => {
    it("flips inclusion", () => {
        let state = withSubreddits(["sadsongs", "pianocovers"]);
        expect(state.subreddits[0].selected).toBe(false);
        state = toggleSubreddit(state, "sadsongs");
        expect(state.subreddits[0].selected).toBe(true);
        expect(state.subreddits[1].selected).toBe(false);
    });

    it("double toggle is the identity", () => {
        const start = withSubreddits(["sadsongs", "pianocovers"]);
        const twice = toggleSubreddit(toggleSubreddit(start, "sadsongs"), "sadsongs");
        expect(twice).toEqual(start);
    });

    it("select all marks every subreddit included", () => {
        const state = selectAllSubreddits(withSubreddits(["a", "b", "c"]));
        expect(state.subreddits.every((s) => s.selected)).toBe(true);
    });
});

describe("filter dependency rule", () => {
    it("comment URLs cannot turn on without both prerequisites", () => {
        let state = initialState();
        state = setFilter(state, "includeCommentUrls", true);
        expect(state.filters.includeCommentUrls).toBe(false);

        state = setFilter(state, "includeComments", true);
        state = setFilter(state, "includeCommentUrls", true);
        expect(state.filters.includeCommentUrls).toBe(false); // metadata still off

        state = setFilter(state, "extractTrackMetadata", true);
        state = setFilter(state, "includeCommentUrls", true);
        expect(state.filters.includeCommentUrls).toBe(true);
    });

    it("unchecking a prerequisite drags comment URLs off", () => {
        let state = initialState();
        state = setFilter(state, "includeComments", true);
        state = setFilter(state, "extractTrackMetadata", true);
        state = setFilter(state, "includeCommentUrls", true);
        expect(state.filters.includeCommentUrls).toBe(true);

        state = setFilter(state, "includeComments", false);
        expect(state.filters.includeCommentUrls).toBe(false);
    });

    it("all filters off is a valid minimal job", () => {
        let state = withSubreddits(["sadsongs"]);
        state = setQuery(state, "sad music");
        state = toggleSubreddit(state, "sadsongs");
        expect(validateJobRequest(buildJobRequest(state))).toEqual([]);
        expect(canLaunch(state)).toBe(true);
    });
});

describe("validator mirror", () => {
    it("agrees with the server's recorded verdicts on the full input space", () => {
        expect(CASES.length).toBe(64);
        for (const serverCase of CASES) {
            const mirrored = validateJobRequest(serverCase.request).map((v) => v.code);
            expect(mirrored, JSON.stringify(serverCase.request)).toEqual(
                serverCase.violation_codes,
            );
        }
    });
});

// ---------------------------------------------------------------------------
// Fuzz: random toggle sequences can never steer the UI into a config the
// server would reject. Each final state is judged by the recorded server
// verdict for its shape; a launchable state must be verdict-clean and the
// dependency codes must be unreachable in any state at all.

function mulberry32(seed: number): () => number {
    let a = seed >>> 0;
    return () => {
        a = (a + 0x6d2b79f5) | 0;
        let t = Math.imul(a ^ (a >>> 15), 1 | a);
        t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
        return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
    };
}

function serverVerdict(body: JobRequestBody): string[] {
    const match = CASES.find(
        (c) =>
            (c.request.query === "") === (body.query === "") &&
            (c.request.subreddits.length === 0) === (body.subreddits.length === 0) &&
            c.request.include_comments === body.include_comments &&
            c.request.extract_track_metadata === body.extract_track_metadata &&
            c.request.include_comment_urls === body.include_comment_urls &&
            c.request.only_scraping === body.only_scraping,
    );
    if (match === undefined) {
        throw new Error(`no recorded verdict for ${JSON.stringify(body)}`);
    }
    return match.violation_codes;
}

describe("fuzzed toggle sequences", () => {
    it("1000 random sequences never reach a server-rejected launch", () => {
        const names = ["sadsongs", "musicsuggestions", "pianocovers"];
        const filterKeys = [
            "includeComments",
            "extractTrackMetadata",
            "includeCommentUrls",
            "onlyScraping",
        ] as const;

        for (let trial = 0; trial < 1000; trial++) {
            const rand = mulberry32(trial);
            let state = withSubreddits(names);
            const steps = 1 + Math.floor(rand() * 24);
            for (let step = 0; step < steps; step++) {
                const action = Math.floor(rand() * 4);
                if (action === 0) {
                    state = toggleSubreddit(state, names[Math.floor(rand() * names.length)]);
                } else if (action === 1) {
                    state = selectAllSubreddits(state);
                } else if (action === 2) {
                    state = setQuery(state, rand() < 0.3 ? "" : "sad music");
                } else {
                    const key = filterKeys[Math.floor(rand() * filterKeys.length)];
                    state = setFilter(state, key, rand() < 0.5);
                }

                const verdict = serverVerdict(buildJobRequest(state));
                // the structurally prevented violations never appear
                expect(verdict).not.toContain(DEPENDS_ON_COMMENTS);
                expect(verdict).not.toContain(DEPENDS_ON_TRACK_METADATA);
                // whenever the launch button is live, the server agrees
                if (canLaunch(state)) {
                    expect(verdict).toEqual([]);
                }
            }
        }
    });
});
