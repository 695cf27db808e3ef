import {
  KIND_LABELS,
  KIND_ORDER,
  type PanelItem,
  type SentenceView,
} from "./types.js";

export interface RenderOptions {
  /** Show only undecided items (long sentences). */
  undecidedOnly: boolean;
  /** Keys whose value changed in the latest response; they stay visible
   *  under the filter and flash so automatic propagation is noticeable. */
  changedKeys: Set<string>;
  expert: boolean;
}

export const DEFAULT_OPTIONS: RenderOptions = {
  undecidedOnly: false,
  changedKeys: new Set(),
  expert: false,
};

/**
 * Pure view -> DOM rendering.  The screen is a function of the latest server
 * view plus local display options; no judging logic lives here.
 */
export function render(view: SentenceView, options: RenderOptions = DEFAULT_OPTIONS): HTMLElement {
  const root = document.createElement("div");
  root.className = `judging state-${view.state} status-${view.status}`;
  root.appendChild(renderHeader(view, options));
  const banner = renderBanner(view);
  if (banner) root.appendChild(banner);
  root.appendChild(renderPanel(view, options));
  if (options.expert && view.forest && view.forest.length > 0) {
    root.appendChild(renderForest(view.forest));
  }
  return root;
}

function renderHeader(view: SentenceView, options: RenderOptions): HTMLElement {
  const header = document.createElement("header");

  const count = document.createElement("span");
  count.className = "good-count";
  count.textContent = `${view.possiblyGood} good QLFs`;
  header.appendChild(count);

  const text = document.createElement("span");
  text.className = "sentence-text";
  text.textContent = view.text;
  header.appendChild(text);

  const filter = document.createElement("label");
  filter.className = "undecided-filter";
  const checkbox = document.createElement("input");
  checkbox.type = "checkbox";
  checkbox.checked = options.undecidedOnly;
  filter.appendChild(checkbox);
  filter.appendChild(document.createTextNode(" undecided only"));
  header.appendChild(filter);

  for (const [className, label] of [
    ["reset-button", "Reset"],
    ["not-ok-button", "Not OK"],
  ] as const) {
    const button = document.createElement("button");
    button.className = className;
    button.textContent = label;
    header.appendChild(button);
  }

  const status = document.createElement("span");
  status.className = "sentence-status";
  status.textContent =
    view.status === "not-ok" && view.failureType
      ? `not-ok: ${view.failureType}`
      : view.status;
  header.appendChild(status);
  return header;
}

function renderBanner(view: SentenceView): HTMLElement | null {
  if (view.state !== "conflict" && !view.autoConflict) return null;
  const banner = document.createElement("div");
  banner.className = "banner conflict-banner";
  banner.textContent =
    view.state === "conflict"
      ? "No analysis is consistent with these judgments; consider marking the sentence Not OK."
      : "Automatic pre-judgments conflicted and were dropped.";
  return banner;
}

function renderPanel(view: SentenceView, options: RenderOptions): HTMLElement {
  const panel = document.createElement("main");
  panel.className = view.state === "conflict" ? "panel dimmed" : "panel";

  const byKind = new Map<string, PanelItem[]>();
  const items: PanelItem[] = [...view.discriminants];
  if (options.expert && view.properties) items.push(...view.properties);
  for (const item of items) {
    const list = byKind.get(item.kind) ?? [];
    list.push(item);
    byKind.set(item.kind, list);
  }

  for (const kind of KIND_ORDER) {
    const group = byKind.get(kind);
    if (!group) continue;
    const section = document.createElement("section");
    section.dataset.kind = kind;
    const heading = document.createElement("h3");
    heading.textContent = KIND_LABELS[kind] ?? kind;
    section.appendChild(heading);
    const list = document.createElement("ul");
    for (const item of group) {
      const rendered = renderItem(item, options);
      if (rendered) list.appendChild(rendered);
    }
    section.appendChild(list);
    panel.appendChild(section);
  }

  const hidden = document.createElement("div");
  hidden.className = "hidden-count";
  hidden.textContent = `${view.hiddenCount} more properties in expert mode`;
  panel.appendChild(hidden);
  return panel;
}

function renderItem(item: PanelItem, options: RenderOptions): HTMLElement | null {
  const decided = item.value !== "undecided";
  const changed = options.changedKeys.has(item.key);
  if (options.undecidedOnly && decided && !changed) return null;

  const li = document.createElement("li");
  li.className = `item ${item.value}${changed && decided ? " flash" : ""}`;
  li.dataset.key = item.key;
  li.dataset.value = item.value;
  if (item.provenance) li.dataset.provenance = item.provenance;

  const label = document.createElement("span");
  label.className = "item-label";
  // bad items keep normal video but carry a leading negation mark
  label.textContent = item.value === "bad" ? `~${item.display}` : item.display;
  li.appendChild(label);

  // explicit fallback controls for devices without a secondary button
  for (const [value, glyph] of [
    ["good", "✓"],
    ["bad", "✗"],
  ] as const) {
    const button = document.createElement("button");
    button.className = `judge-${value}`;
    button.dataset.judge = value;
    button.textContent = glyph;
    li.appendChild(button);
  }
  return li;
}

function renderForest(forest: string[]): HTMLElement {
  const section = document.createElement("section");
  section.className = "forest";
  const heading = document.createElement("h3");
  heading.textContent = `Parse forest (${forest.length} analyses)`;
  section.appendChild(heading);
  const pre = document.createElement("pre");
  pre.textContent = forest.join("\n");
  section.appendChild(pre);
  return section;
}

/** Keys whose value differs between two consecutive views. */
export function changedKeys(previous: SentenceView | null, next: SentenceView): Set<string> {
  const changed = new Set<string>();
  if (!previous) return changed;
  const before = new Map(previous.discriminants.map((d) => [d.key, d.value]));
  for (const item of next.discriminants) {
    if (before.get(item.key) !== item.value) changed.add(item.key);
  }
  return changed;
}
