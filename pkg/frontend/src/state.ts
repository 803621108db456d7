// UI state and the pure operations on it. Everything here is DOM-free so
// the toggle semantics and the validation mirror can be tested directly.

import type { JobRequestBody, SubredditSuggestion, Violation } from "./api.js";

export interface SubredditItem {
    name: string;
    approxPostCount: number;
    selected: boolean;
}

export interface Filters {
    includeComments: boolean;
    extractTrackMetadata: boolean;
    includeCommentUrls: boolean;
    onlyScraping: boolean;
}

export interface UiState {
    query: string;
    subreddits: SubredditItem[];
    filters: Filters;
    activeJobId: string | null;
    theme: "light" | "dark";
}

export function initialState(): UiState {
    return {
        query: "",
        subreddits: [],
        filters: {
            includeComments: false,
            extractTrackMetadata: false,
            includeCommentUrls: false,
            onlyScraping: false,
        },
        activeJobId: null,
        theme: "light",
    };
}

export function loadSuggestions(state: UiState, suggestions: SubredditSuggestion[]): UiState {
    return {
        ...state,
        subreddits: suggestions.map((s) => ({
            name: s.name,
            approxPostCount: s.approx_post_count,
            selected: s.selected,
        })),
    };
}

/** Flip one subreddit between included (green) and excluded (red). */
export function toggleSubreddit(state: UiState, name: string): UiState {
    return {
        ...state,
        subreddits: state.subreddits.map((s) =>
            s.name === name ? { ...s, selected: !s.selected } : s,
        ),
    };
}

export function selectAllSubreddits(state: UiState): UiState {
    return {
        ...state,
        subreddits: state.subreddits.map((s) => ({ ...s, selected: true })),
    };
}

export function setQuery(state: UiState, query: string): UiState {
    return { ...state, query };
}

/**
 * Apply one filter change with the dependency rule: comment URLs can only
 * be on while both comments and track metadata are on. Turning either
 * prerequisite off drags the dependent toggle off with it.
 */
export function setFilter(state: UiState, name: keyof Filters, value: boolean): UiState {
    const filters = { ...state.filters, [name]: value };
    if (name === "includeCommentUrls" && value) {
        if (!filters.includeComments || !filters.extractTrackMetadata) {
            // prerequisite missing: the control is rendered disabled, and
            // even a programmatic attempt must not stick
            filters.includeCommentUrls = false;
        }
    }
    if (!filters.includeComments || !filters.extractTrackMetadata) {
        filters.includeCommentUrls = false;
    }
    return { ...state, filters };
}

export function commentUrlsEnabled(filters: Filters): boolean {
    return filters.includeComments && filters.extractTrackMetadata;
}

export function selectedSubreddits(state: UiState): string[] {
    return state.subreddits.filter((s) => s.selected).map((s) => s.name);
}

export function buildJobRequest(state: UiState): JobRequestBody {
    return {
        query: state.query,
        subreddits: selectedSubreddits(state),
        include_comments: state.filters.includeComments,
        extract_track_metadata: state.filters.extractTrackMetadata,
        include_comment_urls: state.filters.includeCommentUrls,
        only_scraping: state.filters.onlyScraping,
    };
}

// ---------------------------------------------------------------------------
// Client-side mirror of the server's job validation. Codes and order match
// the service exactly; tests/fixtures/validator_cases.json holds the
// server's own verdicts for the whole toggle space and the suite checks
// this function against them case by case.

export const EMPTY_QUERY = "EMPTY_QUERY";
export const NO_SUBREDDITS = "NO_SUBREDDITS";
export const DEPENDS_ON_COMMENTS = "DEPENDS_ON_COMMENTS";
export const DEPENDS_ON_TRACK_METADATA = "DEPENDS_ON_TRACK_METADATA";

export function validateJobRequest(body: JobRequestBody): Violation[] {
    const violations: Violation[] = [];
    if (body.query.trim() === "") {
        violations.push({ code: EMPTY_QUERY, message: "query is empty" });
    }
    if (body.subreddits.length === 0) {
        violations.push({ code: NO_SUBREDDITS, message: "no subreddits selected" });
    }
    if (body.include_comment_urls && !body.include_comments) {
        violations.push({
            code: DEPENDS_ON_COMMENTS,
            message: "comment URLs require retrieving comments",
        });
    }
    if (body.include_comment_urls && !body.extract_track_metadata) {
        violations.push({
            code: DEPENDS_ON_TRACK_METADATA,
            message: "comment URLs require track metadata extraction",
        });
    }
    return violations;
}

/** True when the launch button should be active. */
export function canLaunch(state: UiState): boolean {
    return validateJobRequest(buildJobRequest(state)).length === 0;
}
