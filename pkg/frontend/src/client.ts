/** Thin fetch wrapper over the session API. All timeline edits and chat turns
 * answer with the events they produced; the poll endpoint covers reconnects
 * (replay from the last seen seq). */

import type { GalleryCard, TrimCommandResult, UiEvent } from "./types";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public code: string, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data = await response.json();
    if (!response.ok) {
      const error = (data as { error?: { code: string; message: string } }).error;
      throw new ApiError(error?.code ?? "UnknownError", error?.message ?? "request failed");
    }
    return data as T;
  }

  openSession(project: string): Promise<{ session_id: string; events: UiEvent[] }> {
    return this.request("POST", "/api/sessions", { project });
  }

  postChat(sid: string, text: string): Promise<{ events: UiEvent[] }> {
    return this.request("POST", `/api/sessions/${sid}/chat`, { text });
  }

  timelineOp(
    sid: string,
    op: string,
    body: Record<string, unknown> = {},
  ): Promise<{ events: UiEvent[]; artifact?: { output: string; total_duration_s: number } }> {
    return this.request("POST", `/api/sessions/${sid}/timeline/${op}`, body);
  }

  trimCommand(
    sid: string,
    assetId: number,
    command: string,
  ): Promise<{ events: UiEvent[]; result: TrimCommandResult }> {
    return this.request("POST", `/api/sessions/${sid}/clips/${assetId}/trim-command`, { command });
  }

  pollEvents(sid: string, after: number): Promise<{ events: UiEvent[] }> {
    return this.request("GET", `/api/sessions/${sid}/events?after=${after}`);
  }

  gallery(sid: string): Promise<{ cards: GalleryCard[] }> {
    return this.request("GET", `/api/sessions/${sid}/gallery`);
  }

  frames(
    sid: string,
    assetId: number,
  ): Promise<{ frames: string[]; thumbnails: { start: string; mid: string; end: string } }> {
    return this.request("GET", `/api/sessions/${sid}/assets/${assetId}/frames`);
  }
}
