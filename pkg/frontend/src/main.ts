// Page wiring: discovery, subreddit toggles, filter panel, job launch and
// polling, results views. All business decisions live on the server; the
// one rule duplicated here is the comment-URL dependency, mirrored in
// state.ts and re-checked server-side on submit.

import { ApiClient, ApiError, JobState, Violation } from "./api.js";
import {
    UiState,
    buildJobRequest,
    canLaunch,
    commentUrlsEnabled,
    initialState,
    loadSuggestions,
    selectAllSubreddits,
    setFilter,
    setQuery,
    toggleSubreddit,
    validateJobRequest,
} from "./state.js";
import { renderDendrogram, renderTopicScatter, renderTrends, renderWordcloud } from "./charts.js";
import { renderPostsTable } from "./table.js";
import { initTheme, toggleTheme } from "./theme.js";

const POLL_INTERVAL_MS = 1000;
const TERMINAL_PHASES = new Set(["done", "failed"]);

interface FilterControl {
    key: "includeComments" | "extractTrackMetadata" | "includeCommentUrls" | "onlyScraping";
    label: string;
    tooltip?: string;
}

const FILTER_CONTROLS: FilterControl[] = [
    { key: "includeComments", label: "include comments" },
    { key: "extractTrackMetadata", label: "extract track metadata" },
    {
        key: "includeCommentUrls",
        label: "include comment URLs in track metadata extraction",
        tooltip: "needs both comment retrieval and track metadata extraction",
    },
    { key: "onlyScraping", label: "only scraping (skip annotation and topics)" },
];

export class App {
    state: UiState = initialState();
    private pollTimer: ReturnType<typeof setInterval> | null = null;

    constructor(
        private root: HTMLElement,
        private api: ApiClient,
        private storage: Storage = localStorage,
    ) {}

    mount(): void {
        this.root.innerHTML = `
          <header>
            <h1>museit</h1>
            <button id="theme-toggle" title="toggle dark mode">dark mode</button>
          </header>
          <section id="search-panel">
            <input id="query" type="text" placeholder="search query, e.g. sad music" />
            <button id="discover">find subreddits</button>
            <div id="subreddit-list"></div>
            <button id="select-all" hidden>select all</button>
          </section>
          <section id="filter-panel"></section>
          <section id="launch-panel">
            <button id="launch" disabled>start job</button>
            <ul id="violations"></ul>
          </section>
          <section id="status-panel" hidden>
            <p id="phase"></p>
            <p id="counters"></p>
            <ul id="job-errors"></ul>
          </section>
          <section id="results-panel" hidden>
            <div class="viz-controls">
              <label>granularity
                <select id="granularity">
                  <option value="daily">daily</option>
                  <option value="weekly">weekly</option>
                  <option value="monthly" selected>monthly</option>
                </select>
              </label>
              <label>attribute
                <select id="attribute">
                  <option value="emotion" selected>emotion</option>
                  <option value="sentiment">sentiment</option>
                  <option value="theme">theme</option>
                  <option value="volume">volume</option>
                </select>
              </label>
              <a id="download" download="data.csv">download CSV</a>
            </div>
            <div id="trends"></div>
            <div id="wordcloud"></div>
            <div class="topic-controls">
              <label>highlight topic
                <input id="topic-slider" type="range" min="-1" value="-1" />
              </label>
              <span id="topic-slider-value">all</span>
            </div>
            <div id="topics"></div>
            <div id="dendro"></div>
            <div id="posts"></div>
          </section>
        `;

        this.state = { ...this.state, theme: initTheme(this.storage) };
        this.element<HTMLButtonElement>("theme-toggle").addEventListener("click", () => {
            this.state = { ...this.state, theme: toggleTheme(this.storage) };
        });

        this.element<HTMLButtonElement>("discover").addEventListener("click", () => {
            void this.discover();
        });
        this.element<HTMLInputElement>("query").addEventListener("input", (ev) => {
            this.state = setQuery(this.state, (ev.target as HTMLInputElement).value);
            this.renderLaunch();
        });
        this.element<HTMLButtonElement>("select-all").addEventListener("click", () => {
            this.state = selectAllSubreddits(this.state);
            this.renderSubreddits();
            this.renderLaunch();
        });
        this.element<HTMLButtonElement>("launch").addEventListener("click", () => {
            void this.launch();
        });

        this.renderFilters();
        this.renderLaunch();
    }

    element<T extends HTMLElement>(id: string): T {
        const el = this.root.querySelector(`#${id}`);
        if (el === null) {
            throw new Error(`missing element #${id}`);
        }
        return el as T;
    }

    async discover(): Promise<void> {
        const query = this.element<HTMLInputElement>("query").value;
        this.state = setQuery(this.state, query);
        try {
            const suggestions = await this.api.discoverSubreddits(query);
            this.state = loadSuggestions(this.state, suggestions);
        } catch (err) {
            this.showViolations(err instanceof ApiError ? violationsOf(err) : [
                { code: "NETWORK", message: String(err) },
            ]);
            return;
        }
        this.element<HTMLButtonElement>("select-all").hidden = this.state.subreddits.length === 0;
        this.renderSubreddits();
        this.renderLaunch();
    }

    renderSubreddits(): void {
        const list = this.element<HTMLDivElement>("subreddit-list");
        list.textContent = "";
        for (const item of this.state.subreddits) {
            const chip = document.createElement("button");
            chip.className = `subreddit ${item.selected ? "included" : "excluded"}`;
            chip.dataset.name = item.name;
            chip.textContent = item.name;
            const badge = document.createElement("span");
            badge.className = "badge";
            badge.textContent = String(item.approxPostCount);
            chip.appendChild(badge);
            chip.addEventListener("click", () => {
                this.state = toggleSubreddit(this.state, item.name);
                this.renderSubreddits();
                this.renderLaunch();
            });
            list.appendChild(chip);
        }
    }

    renderFilters(): void {
        const panel = this.element<HTMLElement>("filter-panel");
        panel.textContent = "";
        for (const control of FILTER_CONTROLS) {
            const label = document.createElement("label");
            label.className = "filter";
            if (control.tooltip !== undefined) {
                label.title = control.tooltip;
            }
            const box = document.createElement("input");
            box.type = "checkbox";
            box.id = `filter-${control.key}`;
            box.checked = this.state.filters[control.key];
            if (control.key === "includeCommentUrls") {
                box.disabled = !commentUrlsEnabled(this.state.filters);
            }
            box.addEventListener("change", () => {
                this.state = setFilter(this.state, control.key, box.checked);
                this.renderFilters();
                this.renderLaunch();
            });
            label.appendChild(box);
            label.appendChild(document.createTextNode(` ${control.label}`));
            panel.appendChild(label);
        }
    }

    renderLaunch(): void {
        const button = this.element<HTMLButtonElement>("launch");
        button.disabled = !canLaunch(this.state);
        this.showViolations(validateJobRequest(buildJobRequest(this.state)));
    }

    showViolations(violations: Violation[]): void {
        const list = this.element<HTMLUListElement>("violations");
        list.textContent = "";
        for (const violation of violations) {
            const li = document.createElement("li");
            li.textContent = `${violation.code}: ${violation.message}`;
            list.appendChild(li);
        }
    }

    async launch(): Promise<void> {
        const body = buildJobRequest(this.state);
        // client-side mirror of the server rule; the server re-validates
        if (validateJobRequest(body).length > 0) {
            return;
        }
        let jobId: string;
        try {
            const started = await this.api.startJob(body);
            jobId = started.job_id;
        } catch (err) {
            this.showViolations(err instanceof ApiError ? violationsOf(err) : [
                { code: "NETWORK", message: String(err) },
            ]);
            return;
        }
        this.state = { ...this.state, activeJobId: jobId };
        this.element<HTMLElement>("status-panel").hidden = false;
        this.element<HTMLElement>("results-panel").hidden = true;
        this.startPolling(jobId);
    }

    startPolling(jobId: string): void {
        this.stopPolling();
        this.pollTimer = setInterval(() => {
            void this.pollOnce(jobId);
        }, POLL_INTERVAL_MS);
        void this.pollOnce(jobId);
    }

    stopPolling(): void {
        if (this.pollTimer !== null) {
            clearInterval(this.pollTimer);
            this.pollTimer = null;
        }
    }

    async pollOnce(jobId: string): Promise<void> {
        let snapshot: JobState;
        try {
            snapshot = await this.api.jobState(jobId);
        } catch {
            return; // transient; next tick retries
        }
        if (jobId !== this.state.activeJobId) {
            return; // stale response for a superseded job
        }
        this.element<HTMLParagraphElement>("phase").textContent = `phase: ${snapshot.phase}`;
        const counters = Object.entries(snapshot.counters)
            .map(([key, value]) => `${key}=${value}`)
            .join(" ");
        this.element<HTMLParagraphElement>("counters").textContent = counters;
        const errorList = this.element<HTMLUListElement>("job-errors");
        errorList.textContent = "";
        for (const message of snapshot.errors) {
            const li = document.createElement("li");
            li.textContent = message;
            errorList.appendChild(li);
        }
        if (TERMINAL_PHASES.has(snapshot.phase)) {
            this.stopPolling();
            if (snapshot.phase === "done") {
                await this.showResults(jobId);
            }
        }
    }

    async showResults(jobId: string): Promise<void> {
        this.element<HTMLElement>("results-panel").hidden = false;
        this.element<HTMLAnchorElement>("download").href = this.api.downloadUrl(jobId);

        const granularity = this.element<HTMLSelectElement>("granularity");
        const attribute = this.element<HTMLSelectElement>("attribute");
        const redrawTrends = async () => {
            try {
                const series = await this.api.trends(jobId, granularity.value, attribute.value);
                renderTrends(this.element<HTMLDivElement>("trends"), series);
            } catch {
                this.element<HTMLDivElement>("trends").textContent = "no trend data";
            }
        };
        granularity.onchange = () => void redrawTrends();
        attribute.onchange = () => void redrawTrends();
        await redrawTrends();

        try {
            const cloud = await this.api.wordcloud(jobId);
            renderWordcloud(this.element<HTMLDivElement>("wordcloud"), cloud);
        } catch {
            this.element<HTMLDivElement>("wordcloud").textContent = "no word data";
        }

        const slider = this.element<HTMLInputElement>("topic-slider");
        const sliderValue = this.element<HTMLSpanElement>("topic-slider-value");
        try {
            const topics = await this.api.topics2d(jobId);
            const highlight = renderTopicScatter(this.element<HTMLDivElement>("topics"), topics);
            const ids = topics.topics.map((t) => t.topic_id);
            slider.max = String(ids.length > 0 ? Math.max(...ids) : -1);
            slider.value = "-1";
            sliderValue.textContent = "all";
            slider.oninput = () => {
                const chosen = Number(slider.value);
                if (chosen < 0 || !ids.includes(chosen)) {
                    highlight(null);
                    sliderValue.textContent = "all";
                } else {
                    highlight(chosen);
                    sliderValue.textContent = `topic ${chosen}`;
                }
            };
        } catch {
            this.element<HTMLDivElement>("topics").textContent = "no topic model";
        }

        try {
            const tree = await this.api.dendrogram(jobId);
            renderDendrogram(this.element<HTMLDivElement>("dendro"), tree);
        } catch {
            this.element<HTMLDivElement>("dendro").textContent = "";
        }

        try {
            await renderPostsTable(this.element<HTMLDivElement>("posts"), this.api, jobId);
        } catch {
            this.element<HTMLDivElement>("posts").textContent = "no posts";
        }
    }
}

function violationsOf(err: ApiError): Violation[] {
    const body = err.body as { violations?: Violation[]; error?: string };
    if (Array.isArray(body.violations)) {
        return body.violations;
    }
    return [{ code: body.error ?? `HTTP_${err.status}`, message: `request failed (${err.status})` }];
}

// Boot only in a real page; tests construct App themselves.
if (typeof document !== "undefined" && document.getElementById("app") !== null) {
    const app = new App(document.getElementById("app") as HTMLElement, new ApiClient());
    app.mount();
}
