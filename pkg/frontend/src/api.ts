/** Thin typed client for the refinement service; every number the board
 * shows comes back from these calls — nothing is computed locally. */

import type { BoardState, MetricsDoc } from "./types";

export interface ErrorBody {
  error?: string;
  revision?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ErrorBody,
  ) {
    super(body.error ?? `request failed with status ${status}`);
    this.name = "ApiError";
  }
}

export interface BoardApi {
  getState(): Promise<BoardState>;
  getMetrics(): Promise<MetricsDoc>;
  move(className: string, to: number, revision: number): Promise<BoardState>;
  repartition(n: number): Promise<BoardState>;
  reset(): Promise<BoardState>;
}

export class ApiClient implements BoardApi {
  constructor(private readonly baseUrl = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let body: ErrorBody = {};
      try {
        body = (await response.json()) as ErrorBody;
      } catch {
        // non-JSON error body; keep the status
      }
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  getState(): Promise<BoardState> {
    return this.request<BoardState>("/api/state");
  }

  getMetrics(): Promise<MetricsDoc> {
    return this.request<MetricsDoc>("/api/metrics");
  }

  move(className: string, to: number, revision: number): Promise<BoardState> {
    return this.post<BoardState>("/api/move", { class: className, to, revision });
  }

  repartition(n: number): Promise<BoardState> {
    return this.post<BoardState>("/api/repartition", { n });
  }

  reset(): Promise<BoardState> {
    return this.post<BoardState>("/api/reset", {});
  }
}
