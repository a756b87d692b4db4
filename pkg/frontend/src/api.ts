/** Typed client for the annotation service HTTP API. */

export interface SessionState {
  session_id: string;
  state: "active" | "finished";
  source_len: number;
  reads_done: number;
  exposed: string[];
  target_stream: string[];
  finishable: boolean;
  seq: number;
  actions: [string, string][];
}

export interface ReadResponse extends SessionState {
  exposed_token: string;
}

export interface StreamLogRecord {
  id: string;
  mode: string;
  actions: [string, string][];
}

export interface RatingResponse {
  item_id: string;
  rater_id: string;
  score: number;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }

  /** Another writer advanced the session first (stale expected_seq, etc.). */
  get isConflict(): boolean {
    return this.status === 409;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly base: string = "",
    fetchFn?: FetchLike,
  ) {
    const impl = fetchFn ?? globalThis.fetch;
    if (!impl) throw new Error("no fetch implementation available");
    this.fetchFn = (input, init) => impl(input, init);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) {
      let detail = `${resp.status}`;
      try {
        const payload = (await resp.json()) as { detail?: string };
        if (payload.detail) detail = payload.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  createSession(sourceTokens: string[]): Promise<SessionState> {
    return this.request("POST", "/sessions", { source_tokens: sourceTokens });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  read(sessionId: string, expectedSeq?: number): Promise<ReadResponse> {
    return this.request(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/read`,
      expectedSeq === undefined ? undefined : { expected_seq: expectedSeq },
    );
  }

  write(sessionId: string, token: string, expectedSeq?: number): Promise<SessionState> {
    const body: { token: string; expected_seq?: number } = { token };
    if (expectedSeq !== undefined) body.expected_seq = expectedSeq;
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/write`, body);
  }

  finish(sessionId: string, expectedSeq?: number): Promise<StreamLogRecord> {
    return this.request(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/finish`,
      expectedSeq === undefined ? undefined : { expected_seq: expectedSeq },
    );
  }

  submitRating(itemId: string, raterId: string, score: number): Promise<RatingResponse> {
    return this.request("POST", "/ratings", {
      item_id: itemId,
      rater_id: raterId,
      score,
    });
  }

  exportUrl(): string {
    return this.base + "/export";
  }
}
