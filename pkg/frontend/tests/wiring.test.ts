// DOM wiring against a recorded fake server: red/green toggle chips, the
// disabled-not-just-unchecked dependency checkbox, slider highlighting,
// and granularity switches re-querying the trend endpoint.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient, FetchLike } from "../src/api.js";
import { App } from "../src/main.js";

const SUGGESTIONS = [
    { name: "sadsongs", approx_post_count: 28, selected: false },
    { name: "musicsuggestions", approx_post_count: 19, selected: false },
    { name: "pianocovers", approx_post_count: 13, selected: false },
];

const DONE_STATE = {
    job_id: "j1",
    phase: "done",
    progress: { done: 1.0 },
    counters: { posts: 3, comments: 0, links: 1, tracks: 1 },
    errors: [],
};

const TRENDS = {
    granularity: "monthly",
    attribute: "emotion",
    bins: { "2020-01-01": { joy: 2, sadness: 1 } },
};

const TOPICS = {
    topics: [
        { topic_id: 0, size: 5, keywords: [["piano", 2.0]], x: -0.4, y: 0.1 },
        { topic_id: 1, size: 3, keywords: [["rap", 1.5]], x: 0.5, y: -0.2 },
        { topic_id: 2, size: 2, keywords: [["lofi", 1.1]], x: 0.1, y: 0.4 },
    ],
    outliers: 1,
};

const DENDROGRAM = {
    merges: [
        [0, 1, 0.4, 3],
        [2, 3, 0.9, 4],
    ],
    leaves: [0, 1, 2],
};

const POST_ROW = {
    reddit_post_id: "p1",
    subreddit: "sadsongs",
    title: "a sad song",
    post_body: "",
    post_url: "https://reddit.test/p1",
    created_utc: 1577880000,
    num_comments: 2,
    urls: [],
    spotify_urls: [],
    comments: null,
    comment_spotify_urls: null,
    theme: "music_sharing",
    sentiment: "negative",
    emotion: "sadness",
    topic_id: 0,
};

function fakeServer(): { calls: string[]; fetch: FetchLike } {
    const calls: string[] = [];
    const json = (body: unknown, status = 200) =>
        new Response(JSON.stringify(body), {
            status,
            headers: { "content-type": "application/json" },
        });

    const doFetch: FetchLike = (url, init) => {
        calls.push(`${init?.method ?? "GET"} ${url}`);
        if (url.startsWith("/api/subreddits")) {
            return Promise.resolve(json(SUGGESTIONS));
        }
        if (url === "/api/jobs") {
            return Promise.resolve(json({ job_id: "j1" }));
        }
        if (url === "/api/jobs/j1") {
            return Promise.resolve(json(DONE_STATE));
        }
        if (url.startsWith("/api/jobs/j1/viz/emotion-ts")) {
            return Promise.resolve(json(TRENDS));
        }
        if (url.startsWith("/api/jobs/j1/viz/wordcloud")) {
            return Promise.resolve(json({ words: [{ token: "sad", count: 3 }] }));
        }
        if (url.startsWith("/api/jobs/j1/viz/topics-2d")) {
            return Promise.resolve(json(TOPICS));
        }
        if (url.startsWith("/api/jobs/j1/viz/dendrogram")) {
            return Promise.resolve(json(DENDROGRAM));
        }
        if (url.startsWith("/api/jobs/j1/posts")) {
            return Promise.resolve(json({ page: 1, page_size: 50, total: 1, posts: [POST_ROW] }));
        }
        return Promise.resolve(json({ error: "UNKNOWN" }, 404));
    };
    return { calls, fetch: doFetch };
}

async function until(check: () => boolean, what: string): Promise<void> {
    for (let i = 0; i < 400; i++) {
        if (check()) {
            return;
        }
        await new Promise((resolve) => setTimeout(resolve, 5));
    }
    throw new Error(`timed out waiting for ${what}`);
}

function mountApp(): { app: App; root: HTMLElement; calls: string[] } {
    const server = fakeServer();
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new App(root, new ApiClient(server.fetch), localStorage);
    app.mount();
    return { app, root, calls: server.calls };
}

async function discover(app: App, root: HTMLElement): Promise<void> {
    (root.querySelector("#query") as HTMLInputElement).value = "sad music";
    root.querySelector("#query")!.dispatchEvent(new Event("input"));
    (root.querySelector("#discover") as HTMLButtonElement).click();
    await until(() => root.querySelectorAll(".subreddit").length === 3, "suggestions");
}

beforeEach(() => {
    document.body.innerHTML = "";
    localStorage.clear();
});

describe("subreddit chips", () => {
    it("toggle flips red to green and back", async () => {
        const { app, root } = mountApp();
        await discover(app, root);

        const chip = () => root.querySelector('[data-name="sadsongs"]') as HTMLButtonElement;
        expect(chip().classList.contains("excluded")).toBe(true);
        expect(chip().querySelector(".badge")!.textContent).toBe("28");

        chip().click();
        expect(chip().classList.contains("included")).toBe(true);
        expect(chip().querySelector(".badge")).not.toBeNull();

        chip().click();
        expect(chip().classList.contains("excluded")).toBe(true);
        expect(app.state.subreddits.every((s) => !s.selected)).toBe(true);
    });

    it("select all turns every chip green", async () => {
        const { app, root } = mountApp();
        await discover(app, root);
        (root.querySelector("#select-all") as HTMLButtonElement).click();
        expect(root.querySelectorAll(".subreddit.included").length).toBe(3);
    });
});

describe("filter panel", () => {
    it("keeps the comment-URL box disabled until both prerequisites are on", () => {
        const { root } = mountApp();
        const box = (key: string) => root.querySelector(`#filter-${key}`) as HTMLInputElement;

        expect(box("includeCommentUrls").disabled).toBe(true);

        box("includeComments").click();
        expect(box("includeCommentUrls").disabled).toBe(true);

        box("extractTrackMetadata").click();
        expect(box("includeCommentUrls").disabled).toBe(false);

        box("includeCommentUrls").click();
        expect(box("includeCommentUrls").checked).toBe(true);

        // dropping a prerequisite unchecks and disables the dependent box
        box("includeComments").click();
        expect(box("includeCommentUrls").checked).toBe(false);
        expect(box("includeCommentUrls").disabled).toBe(true);
    });

    it("shows the dependency explanation as a tooltip", () => {
        const { root } = mountApp();
        const label = (root.querySelector("#filter-includeCommentUrls") as HTMLElement)
            .closest("label") as HTMLElement;
        expect(label.title).toContain("comment retrieval");
    });
});

describe("job results", () => {
    async function runToResults() {
        const mounted = mountApp();
        await discover(mounted.app, mounted.root);
        (mounted.root.querySelector("#select-all") as HTMLButtonElement).click();
        const launch = mounted.root.querySelector("#launch") as HTMLButtonElement;
        expect(launch.disabled).toBe(false);
        launch.click();
        await until(
            () => mounted.root.querySelectorAll(".topic-point").length === 3,
            "results rendered",
        );
        mounted.app.stopPolling();
        return mounted;
    }

    it("slider highlights exactly one topic's points", async () => {
        const { root } = await runToResults();
        const slider = root.querySelector("#topic-slider") as HTMLInputElement;

        slider.value = "1";
        slider.dispatchEvent(new Event("input"));
        const highlighted = root.querySelectorAll(".topic-point.highlight");
        expect(highlighted.length).toBe(1);
        expect(highlighted[0].getAttribute("data-topic-id")).toBe("1");
        expect(root.querySelectorAll(".topic-point.dimmed").length).toBe(2);

        slider.value = "-1";
        slider.dispatchEvent(new Event("input"));
        expect(root.querySelectorAll(".topic-point.highlight").length).toBe(0);
        expect(root.querySelectorAll(".topic-point.dimmed").length).toBe(0);
    });

    it("granularity switch re-queries the trend endpoint", async () => {
        const { root, calls } = await runToResults();
        expect(
            calls.some((c) => c.includes("/viz/emotion-ts?granularity=monthly&attribute=emotion")),
        ).toBe(true);

        const before = calls.length;
        const granularity = root.querySelector("#granularity") as HTMLSelectElement;
        granularity.value = "daily";
        granularity.dispatchEvent(new Event("change"));
        await until(
            () => calls.slice(before).some((c) => c.includes("granularity=daily")),
            "daily re-query",
        );
        expect(
            calls.some((c) => c.includes("/viz/emotion-ts?granularity=daily&attribute=emotion")),
        ).toBe(true);
    });

    it("wires the download link to the job's CSV endpoint", async () => {
        const { root } = await runToResults();
        const link = root.querySelector("#download") as HTMLAnchorElement;
        expect(link.getAttribute("href")).toBe("/api/jobs/j1/download");
    });

    it("renders the dendrogram and the posts table", async () => {
        const { root } = await runToResults();
        expect(root.querySelectorAll(".dendrogram .merge").length).toBe(2);
        await until(() => root.querySelectorAll("table.posts tbody tr").length === 1, "table");
        const cells = [...root.querySelectorAll("table.posts tbody tr td")].map(
            (td) => td.textContent,
        );
        expect(cells).toContain("a sad song");
        expect(cells).toContain("sadness");
    });
});
