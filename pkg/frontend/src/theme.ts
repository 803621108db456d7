// Dark mode with persistence. The saved choice is applied again on every
// page load, so the theme survives reloads.

const THEME_KEY = "museit-theme";

export type Theme = "light" | "dark";

export function loadTheme(storage: Storage = localStorage): Theme {
    return storage.getItem(THEME_KEY) === "dark" ? "dark" : "light";
}

export function applyTheme(theme: Theme, root: HTMLElement = document.body): void {
    root.classList.toggle("dark", theme === "dark");
}

export function toggleTheme(storage: Storage = localStorage, root: HTMLElement = document.body): Theme {
    const next: Theme = loadTheme(storage) === "dark" ? "light" : "dark";
    storage.setItem(THEME_KEY, next);
    applyTheme(next, root);
    return next;
}

export function initTheme(storage: Storage = localStorage, root: HTMLElement = document.body): Theme {
    const theme = loadTheme(storage);
    applyTheme(theme, root);
    return theme;
}
