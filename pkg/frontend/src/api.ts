// Typed wrappers over the service endpoints. The fetch function is
// injectable so tests can run against a spy instead of a server.

export interface SubredditSuggestion {
    name: string;
    approx_post_count: number;
    selected: boolean;
}

export interface Violation {
    code: string;
    message: string;
}

export interface JobRequestBody {
    query: string;
    subreddits: string[];
    include_comments: boolean;
    extract_track_metadata: boolean;
    include_comment_urls: boolean;
    only_scraping: boolean;
}

export interface JobState {
    job_id: string;
    phase: string;
    progress: Record<string, number>;
    counters: Record<string, number>;
    errors: string[];
}

export interface TrendSeries {
    granularity: string;
    attribute: string;
    bins: Record<string, Record<string, number>>;
}

export interface WordCloud {
    words: { token: string; count: number }[];
}

export interface TopicPoint {
    topic_id: number;
    size: number;
    keywords: [string, number][];
    x: number;
    y: number;
}

export interface Topics2d {
    topics: TopicPoint[];
    outliers: number;
}

export interface Dendrogram {
    merges: [number, number, number, number][];
    leaves: number[];
}

export interface PostRow {
    reddit_post_id: string;
    subreddit: string;
    title: string;
    post_url: string;
    created_utc: number;
    num_comments: number;
    spotify_urls: string[];
    theme: string | null;
    sentiment: string | null;
    emotion: string | null;
    topic_id: number | null;
}

export interface PostsPage {
    page: number;
    page_size: number;
    total: number;
    posts: PostRow[];
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
    constructor(
        public status: number,
        public body: unknown,
    ) {
        super(`HTTP ${status}`);
    }
}

export class ApiClient {
    constructor(private doFetch: FetchLike = (url, init) => fetch(url, init)) {}

    private async getJson<T>(url: string): Promise<T> {
        const resp = await this.doFetch(url);
        const body = await resp.json();
        if (!resp.ok) {
            throw new ApiError(resp.status, body);
        }
        return body as T;
    }

    discoverSubreddits(query: string): Promise<SubredditSuggestion[]> {
        return this.getJson(`/api/subreddits?q=${encodeURIComponent(query)}`);
    }

    async startJob(body: JobRequestBody): Promise<{ job_id: string }> {
        const resp = await this.doFetch("/api/jobs", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(body),
        });
        const payload = await resp.json();
        if (!resp.ok) {
            throw new ApiError(resp.status, payload);
        }
        return payload as { job_id: string };
    }

    jobState(jobId: string): Promise<JobState> {
        return this.getJson(`/api/jobs/${jobId}`);
    }

    trends(jobId: string, granularity: string, attribute: string): Promise<TrendSeries> {
        const params = `granularity=${granularity}&attribute=${attribute}`;
        return this.getJson(`/api/jobs/${jobId}/viz/emotion-ts?${params}`);
    }

    wordcloud(jobId: string): Promise<WordCloud> {
        return this.getJson(`/api/jobs/${jobId}/viz/wordcloud`);
    }

    topics2d(jobId: string): Promise<Topics2d> {
        return this.getJson(`/api/jobs/${jobId}/viz/topics-2d`);
    }

    dendrogram(jobId: string): Promise<Dendrogram> {
        return this.getJson(`/api/jobs/${jobId}/viz/dendrogram`);
    }

    postsPage(jobId: string, page: number): Promise<PostsPage> {
        return this.getJson(`/api/jobs/${jobId}/posts?page=${page}`);
    }

    downloadUrl(jobId: string): string {
        return `/api/jobs/${jobId}/download`;
    }
}
