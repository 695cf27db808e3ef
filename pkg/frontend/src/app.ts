import { ApiClient, ApiError } from "./api.js";
import { changedKeys, render, type RenderOptions } from "./panel.js";
import type { JudgmentValue, SentenceView } from "./types.js";

/**
 * Wires the rendered panel to the service.
 *
 * Left click judges an item good, right click (or the fallback buttons)
 * judges it bad; clicking a decided item re-judges it, superseding the
 * earlier judgment.  Every response replaces the whole screen, so the final
 * state always equals a plain render of the latest server view.
 */
export class App {
  private view: SentenceView | null = null;
  private options: RenderOptions = {
    undecidedOnly: false,
    changedKeys: new Set(),
    expert: false,
  };
  private flashTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private sentenceId: string,
    expert = false,
    private flashMillis = 1500,
  ) {
    this.options.expert = expert;
    this.root.addEventListener("click", (event) => this.onClick(event as MouseEvent));
    this.root.addEventListener("contextmenu", (event) =>
      this.onContextMenu(event as MouseEvent),
    );
    this.root.addEventListener("change", (event) => this.onChange(event));
  }

  async load(): Promise<void> {
    try {
      this.show(await this.api.getSentence(this.sentenceId, this.options.expert));
    } catch (error) {
      this.showError(error, () => void this.load());
    }
  }

  /** Resolves once queued mutations have been applied and drawn. */
  whenIdle(): Promise<void> {
    return this.api.whenIdle();
  }

  currentView(): SentenceView | null {
    return this.view;
  }

  private show(next: SentenceView): void {
    this.options.changedKeys = changedKeys(this.view, next);
    this.view = next;
    this.draw();
    if (this.flashTimer) clearTimeout(this.flashTimer);
    if (this.options.changedKeys.size > 0) {
      // after the flash period the filter may hide freshly decided items
      this.flashTimer = setTimeout(() => {
        this.options.changedKeys = new Set();
        this.draw();
      }, this.flashMillis);
    }
  }

  private draw(): void {
    if (!this.view) return;
    this.root.replaceChildren(render(this.view, this.options));
  }

  private showError(error: unknown, retry: () => void): void {
    const banner = document.createElement("div");
    banner.className = "banner error-banner";
    const message = error instanceof ApiError ? error.message : String(error);
    banner.textContent = `Request failed: ${message} `;
    const button = document.createElement("button");
    button.className = "retry-button";
    button.textContent = "Retry";
    button.addEventListener("click", retry);
    banner.appendChild(button);
    this.root.prepend(banner);
  }

  private itemKey(target: EventTarget | null): string | null {
    const item = target instanceof Element ? target.closest<HTMLElement>(".item") : null;
    return item?.dataset.key ?? null;
  }

  private onClick(event: MouseEvent): void {
    const target = event.target as Element | null;
    if (target?.closest(".reset-button")) {
      this.mutate((seq) => this.api.reset(this.sentenceId, seq, this.options.expert));
      return;
    }
    if (target?.closest(".not-ok-button")) {
      const failureType = this.promptFailureType();
      if (failureType) {
        this.mutate(() =>
          this.api.setStatus(
            this.sentenceId,
            "not-ok",
            failureType,
            undefined,
            this.options.expert,
          ),
        );
      }
      return;
    }
    const key = this.itemKey(target);
    if (!key) return;
    const judgeButton = target?.closest<HTMLElement>("[data-judge]");
    const value: JudgmentValue = judgeButton?.dataset.judge === "bad" ? "bad" : "good";
    this.judge(key, value);
  }

  private onContextMenu(event: MouseEvent): void {
    const key = this.itemKey(event.target);
    if (!key) return; // outside the panel the browser menu stays available
    event.preventDefault();
    this.judge(key, "bad");
  }

  private onChange(event: Event): void {
    const target = event.target as HTMLInputElement | null;
    if (target && target.closest(".undecided-filter")) {
      this.options.undecidedOnly = target.checked;
      this.draw();
    }
  }

  private judge(key: string, value: JudgmentValue): void {
    this.mutate((seq) =>
      this.api.judge(this.sentenceId, key, value, seq, this.options.expert),
    );
  }

  private mutate(send: (seq?: number) => Promise<SentenceView>): void {
    const seq = this.view?.seq;
    void send(seq)
      .then((next) => this.show(next))
      .catch((error) => this.showError(error, () => void this.load()));
  }

  private promptFailureType(): string | null {
    const input = window.prompt(
      "Failure type (missing-lexicon, missing-construction, wrong-tree-only, "
        + "extraction-gap, other):",
      "other",
    );
    return input && input.trim() ? input.trim() : null;
  }
}
