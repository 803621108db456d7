// SVG renderers for the visualization payloads. The server computes all
// numbers; these functions only draw what they are given.

import type { Dendrogram, Topics2d, TrendSeries, WordCloud } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function svgElement(tag: string, attrs: Record<string, string | number>): SVGElement {
    const el = document.createElementNS(SVG_NS, tag);
    for (const [key, value] of Object.entries(attrs)) {
        el.setAttribute(key, String(value));
    }
    return el;
}

const PALETTE = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

export function colorFor(index: number): string {
    return PALETTE[((index % PALETTE.length) + PALETTE.length) % PALETTE.length];
}

// --- time series ----------------------------------------------------------

export function renderTrends(container: HTMLElement, series: TrendSeries): void {
    container.textContent = "";
    const bins = Object.keys(series.bins).sort();
    const labels = new Set<string>();
    for (const key of bins) {
        for (const label of Object.keys(series.bins[key])) {
            labels.add(label);
        }
    }
    const width = 640;
    const height = 240;
    const pad = 28;
    const svg = svgElement("svg", {
        viewBox: `0 0 ${width} ${height}`,
        width: "100%",
        class: "trends-chart",
    });

    let maxCount = 1;
    for (const key of bins) {
        for (const count of Object.values(series.bins[key])) {
            maxCount = Math.max(maxCount, count);
        }
    }
    const xOf = (i: number) =>
        bins.length === 1 ? width / 2 : pad + (i * (width - 2 * pad)) / (bins.length - 1);
    const yOf = (count: number) => height - pad - (count * (height - 2 * pad)) / maxCount;

    let colorIndex = 0;
    for (const label of [...labels].sort()) {
        const points = bins
            .map((key, i) => `${xOf(i)},${yOf(series.bins[key][label] ?? 0)}`)
            .join(" ");
        const line = svgElement("polyline", {
            points,
            fill: "none",
            stroke: colorFor(colorIndex),
            "stroke-width": 2,
            "data-label": label,
        });
        svg.appendChild(line);
        colorIndex += 1;
    }
    svg.appendChild(svgElement("line", {
        x1: pad, y1: height - pad, x2: width - pad, y2: height - pad,
        stroke: "currentColor", "stroke-width": 1,
    }));
    container.appendChild(svg);

    const legend = document.createElement("div");
    legend.className = "legend";
    let i = 0;
    for (const label of [...labels].sort()) {
        const item = document.createElement("span");
        item.textContent = label;
        item.style.color = colorFor(i);
        legend.appendChild(item);
        i += 1;
    }
    container.appendChild(legend);
}

// --- word cloud ------------------------------------------------------------

export function renderWordcloud(container: HTMLElement, cloud: WordCloud): void {
    container.textContent = "";
    const box = document.createElement("div");
    box.className = "wordcloud";
    const top = cloud.words.slice(0, 80);
    const maxCount = top.length > 0 ? top[0].count : 1;
    for (const word of top) {
        const span = document.createElement("span");
        span.textContent = word.token;
        span.title = `${word.count}`;
        const scale = 0.8 + 1.6 * (word.count / maxCount);
        span.style.fontSize = `${scale}em`;
        box.appendChild(span);
        box.appendChild(document.createTextNode(" "));
    }
    container.appendChild(box);
}

// --- topic scatter with highlight slider ------------------------------------

/**
 * Draw the 2D topic map. Returns the highlight function so the caller can
 * wire it to a slider: highlight(topicId) marks exactly that topic's point
 * and dims the rest; highlight(null) clears the emphasis.
 */
export function renderTopicScatter(
    container: HTMLElement,
    topics: Topics2d,
): (topicId: number | null) => void {
    container.textContent = "";
    const width = 480;
    const height = 360;
    const pad = 30;
    const svg = svgElement("svg", {
        viewBox: `0 0 ${width} ${height}`,
        width: "100%",
        class: "topic-scatter",
    });

    const xs = topics.topics.map((t) => t.x);
    const ys = topics.topics.map((t) => t.y);
    const xMin = Math.min(0, ...xs);
    const xMax = Math.max(0, ...xs);
    const yMin = Math.min(0, ...ys);
    const yMax = Math.max(0, ...ys);
    const xSpan = xMax - xMin || 1;
    const ySpan = yMax - yMin || 1;
    const maxSize = Math.max(1, ...topics.topics.map((t) => t.size));

    for (const topic of topics.topics) {
        const cx = pad + ((topic.x - xMin) / xSpan) * (width - 2 * pad);
        const cy = height - pad - ((topic.y - yMin) / ySpan) * (height - 2 * pad);
        const r = 6 + 14 * Math.sqrt(topic.size / maxSize);
        const dot = svgElement("circle", {
            cx, cy, r,
            fill: colorFor(topic.topic_id),
            "fill-opacity": 0.75,
            class: "topic-point",
            "data-topic-id": topic.topic_id,
        });
        const keywords = topic.keywords.slice(0, 5).map(([token]) => token).join(", ");
        const title = document.createElementNS(SVG_NS, "title");
        title.textContent = `topic ${topic.topic_id} (${topic.size} posts): ${keywords}`;
        dot.appendChild(title);
        svg.appendChild(dot);
    }
    container.appendChild(svg);

    return (topicId: number | null) => {
        for (const node of svg.querySelectorAll(".topic-point")) {
            const isTarget = topicId !== null && node.getAttribute("data-topic-id") === String(topicId);
            node.classList.toggle("highlight", isTarget);
            node.classList.toggle("dimmed", topicId !== null && !isTarget);
        }
    };
}

// --- dendrogram -------------------------------------------------------------

export function renderDendrogram(container: HTMLElement, tree: Dendrogram): void {
    container.textContent = "";
    const leaves = tree.leaves;
    if (leaves.length < 2) {
        const note = document.createElement("p");
        note.textContent = "only one topic; nothing to merge";
        container.appendChild(note);
        return;
    }
    const width = 480;
    const height = 300;
    const pad = 30;
    const svg = svgElement("svg", {
        viewBox: `0 0 ${width} ${height}`,
        width: "100%",
        class: "dendrogram",
    });

    const maxHeight = Math.max(...tree.merges.map((m) => m[2]), 1e-12);
    const yOf = (h: number) => height - pad - (h / maxHeight) * (height - 2 * pad);

    // node id -> current x position and the height it sits at
    const position = new Map<number, { x: number; y: number }>();
    leaves.forEach((leaf, i) => {
        const x = pad + (i * (width - 2 * pad)) / Math.max(1, leaves.length - 1);
        position.set(leaf, { x, y: height - pad });
        const label = svgElement("text", {
            x, y: height - pad + 16, "text-anchor": "middle", class: "leaf-label",
        });
        label.textContent = String(leaf);
        svg.appendChild(label);
    });

    for (const [left, right, mergeHeight, newId] of tree.merges) {
        const a = position.get(left);
        const b = position.get(right);
        if (a === undefined || b === undefined) {
            continue;
        }
        const y = yOf(mergeHeight);
        const path = svgElement("path", {
            d: `M ${a.x} ${a.y} V ${y} H ${b.x} V ${b.y}`,
            fill: "none",
            stroke: "currentColor",
            "stroke-width": 1.5,
            class: "merge",
        });
        svg.appendChild(path);
        position.set(newId, { x: (a.x + b.x) / 2, y });
    }
    container.appendChild(svg);
}
