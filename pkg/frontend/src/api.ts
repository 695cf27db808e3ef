import type { JudgmentValue, SentenceView } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

function expertSuffix(expert: boolean): string {
  return expert ? "?expert=true" : "";
}

/**
 * Thin client over the annotation service.
 *
 * Mutations are queued so at most one is in flight per client: a click that
 * lands while a request is pending waits for the response instead of
 * interleaving.  A mutation carries the sequence token of the view it was
 * based on; if the server answers 409 (someone else moved the sentence) the
 * request is retried once without the token, and failures after that are
 * surfaced to the caller.
 */
export class ApiClient {
  private chain: Promise<unknown> = Promise.resolve();

  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async getSentence(id: string, expert = false): Promise<SentenceView> {
    return this.request(`/sentences/${encodeURIComponent(id)}${expertSuffix(expert)}`);
  }

  judge(
    id: string,
    key: string,
    value: JudgmentValue,
    seq?: number,
    expert = false,
  ): Promise<SentenceView> {
    return this.enqueueWithRetry(
      `/sentences/${encodeURIComponent(id)}/judgments${expertSuffix(expert)}`,
      { key, value, seq },
    );
  }

  reset(id: string, seq?: number, expert = false): Promise<SentenceView> {
    return this.enqueueWithRetry(
      `/sentences/${encodeURIComponent(id)}/reset${expertSuffix(expert)}`,
      { seq },
    );
  }

  setStatus(
    id: string,
    status: "ok" | "not-ok" | "undecided",
    failureType?: string,
    comment?: string,
    expert = false,
  ): Promise<SentenceView> {
    return this.enqueue(() =>
      this.request(`/sentences/${encodeURIComponent(id)}/status${expertSuffix(expert)}`, {
        status,
        failureType,
        comment,
      }),
    );
  }

  /** Resolves after every mutation queued so far has settled. */
  whenIdle(): Promise<void> {
    return this.chain.then(
      () => undefined,
      () => undefined,
    );
  }

  private enqueueWithRetry(path: string, body: Record<string, unknown>): Promise<SentenceView> {
    return this.enqueue(async () => {
      try {
        return await this.request(path, body);
      } catch (error) {
        if (error instanceof ApiError && error.status === 409) {
          const retry = { ...body };
          delete retry.seq;
          return await this.request(path, retry);
        }
        throw error;
      }
    });
  }

  private enqueue(task: () => Promise<SentenceView>): Promise<SentenceView> {
    const next = this.chain.then(task, task);
    this.chain = next.catch(() => undefined);
    return next;
  }

  private async request(path: string, body?: Record<string, unknown>): Promise<SentenceView> {
    const init: RequestInit | undefined = body
      ? {
          method: "POST",
          headers: { "content-type": "application/json" },
          body: JSON.stringify(body),
        }
      : undefined;
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const parsed = (await response.json()) as { detail?: string };
        if (parsed.detail) detail = parsed.detail;
      } catch {
        /* keep the status text */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as SentenceView;
  }
}
