/** REST client for the session service. All numbers arrive as decimal floats. */

import type { InstancePayload, SessionView } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`HTTP ${status}: ${JSON.stringify(detail)}`);
  }
}

type FetchLike = typeof fetch;

export class SessionApi {
  constructor(
    public baseUrl: string,
    private fetchFn: FetchLike = fetch,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      // non-JSON body; keep null
    }
    if (!response.ok) {
      const detail =
        payload && typeof payload === "object" && "detail" in payload
          ? (payload as { detail: unknown }).detail
          : payload;
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  async health(): Promise<boolean> {
    try {
      await this.request<{ status: string }>("GET", "/healthz");
      return true;
    } catch {
      return false;
    }
  }

  async createSession(
    instance: InstancePayload,
    elicitor: string,
    config?: Record<string, unknown>,
  ): Promise<string> {
    const body: Record<string, unknown> = { instance, elicitor };
    if (config !== undefined) body.config = config;
    const data = await this.request<{ session_id: string }>("POST", "/sessions", body);
    return data.session_id;
  }

  getView(sessionId: string, fullRanking = false): Promise<SessionView> {
    const suffix = fullRanking ? "?full_ranking=true" : "";
    return this.request<SessionView>("GET", `/sessions/${sessionId}${suffix}`);
  }

  step(sessionId: string): Promise<SessionView> {
    return this.request<SessionView>("POST", `/sessions/${sessionId}/step`);
  }

  answer(sessionId: string, text: string): Promise<SessionView> {
    return this.request<SessionView>("POST", `/sessions/${sessionId}/answer`, { text });
  }

  expand(sessionId: string): Promise<SessionView> {
    return this.request<SessionView>("POST", `/sessions/${sessionId}/expand`);
  }

  transcript(sessionId: string): Promise<{ events: unknown[] }> {
    return this.request<{ events: unknown[] }>("GET", `/sessions/${sessionId}/transcript`);
  }
}
