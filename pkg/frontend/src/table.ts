// Paged post table. One fetch per page; the pager re-renders in place.

import type { ApiClient, PostsPage } from "./api.js";

const COLUMNS: [string, (row: PostsPage["posts"][number]) => string][] = [
    ["subreddit", (r) => r.subreddit],
    ["title", (r) => r.title],
    ["created", (r) => new Date(r.created_utc * 1000).toISOString().slice(0, 10)],
    ["comments", (r) => String(r.num_comments)],
    ["spotify links", (r) => r.spotify_urls.join(" ")],
    ["theme", (r) => r.theme ?? ""],
    ["sentiment", (r) => r.sentiment ?? ""],
    ["emotion", (r) => r.emotion ?? ""],
    ["topic", (r) => (r.topic_id === null ? "" : String(r.topic_id))],
];

export async function renderPostsTable(
    container: HTMLElement,
    api: ApiClient,
    jobId: string,
    page = 1,
): Promise<void> {
    const data = await api.postsPage(jobId, page);
    container.textContent = "";

    const table = document.createElement("table");
    table.className = "posts";
    const head = table.createTHead().insertRow();
    for (const [label] of COLUMNS) {
        const th = document.createElement("th");
        th.textContent = label;
        head.appendChild(th);
    }
    const body = table.createTBody();
    for (const row of data.posts) {
        const tr = body.insertRow();
        for (const [, cell] of COLUMNS) {
            tr.insertCell().textContent = cell(row);
        }
    }
    container.appendChild(table);

    const pages = Math.max(1, Math.ceil(data.total / data.page_size));
    const pager = document.createElement("div");
    pager.className = "pager";
    const info = document.createElement("span");
    info.textContent = `page ${data.page} of ${pages} (${data.total} posts)`;
    const prev = document.createElement("button");
    prev.textContent = "prev";
    prev.disabled = data.page <= 1;
    prev.addEventListener("click", () => {
        void renderPostsTable(container, api, jobId, data.page - 1);
    });
    const next = document.createElement("button");
    next.textContent = "next";
    next.disabled = data.page >= pages;
    next.addEventListener("click", () => {
        void renderPostsTable(container, api, jobId, data.page + 1);
    });
    pager.append(prev, info, next);
    container.appendChild(pager);
}
