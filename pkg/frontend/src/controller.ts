/** Board state machine: loads server state, applies edits, tracks the
 * metrics snapshot preceding the last edit for delta display.
 *
 * Optimistic updates are deliberately absent — the board re-renders only
 * from confirmed server responses, and a stale-revision conflict (409)
 * refetches the authoritative state instead of retrying the edit. */

import { ApiError, type BoardApi } from "./api";
import { isNoOpMove, metricRows, type MetricRow } from "./board";
import type { BoardState, Metrics } from "./types";

export type Status =
  | { kind: "loading" }
  | { kind: "error"; message: string }
  | { kind: "ready" };

export class BoardController {
  state: BoardState | null = null;
  status: Status = { kind: "loading" };
  notice: string | null = null;

  private metricsBeforeEdit: Metrics | null = null;
  private listeners: Array<() => void> = [];

  constructor(private readonly api: BoardApi) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  /** Accept a confirmed server state; `before` is the displayed metrics
   * snapshot the edit started from (null resets deltas to zero). */
  private accept(next: BoardState, before: Metrics | null): void {
    this.state = next;
    this.metricsBeforeEdit = next.edit_count === 0 ? null : before;
    this.status = { kind: "ready" };
  }

  async load(): Promise<void> {
    this.status = { kind: "loading" };
    this.emit();
    try {
      this.accept(await this.api.getState(), null);
      this.notice = null;
    } catch (error) {
      this.status = {
        kind: "error",
        message: error instanceof Error ? error.message : String(error),
      };
    }
    this.emit();
  }

  async moveClass(className: string, toId: number): Promise<void> {
    if (this.state === null) return;
    if (isNoOpMove(this.state, className, toId)) return; // no request
    const before = this.state.metrics;
    try {
      this.accept(await this.api.move(className, toId, this.state.revision), before);
      this.notice = null;
    } catch (error) {
      await this.handleEditError(error);
    }
    this.emit();
  }

  async repartition(n: number): Promise<void> {
    try {
      this.accept(await this.api.repartition(n), null);
      this.notice = null;
    } catch (error) {
      await this.handleEditError(error);
    }
    this.emit();
  }

  async reset(): Promise<void> {
    try {
      this.accept(await this.api.reset(), null);
      this.notice = null;
    } catch (error) {
      await this.handleEditError(error);
    }
    this.emit();
  }

  private async handleEditError(error: unknown): Promise<void> {
    if (error instanceof ApiError && error.status === 409) {
      // Someone else edited first: show their board, drop our deltas.
      this.notice = "Board changed elsewhere — reloaded the latest state.";
      try {
        this.accept(await this.api.getState(), null);
      } catch (refetchError) {
        this.status = {
          kind: "error",
          message:
            refetchError instanceof Error
              ? refetchError.message
              : String(refetchError),
        };
      }
      return;
    }
    if (error instanceof ApiError) {
      // Invalid edit: surface the reason, keep the board untouched.
      this.notice = error.body.error ?? error.message;
      return;
    }
    this.status = {
      kind: "error",
      message: error instanceof Error ? error.message : String(error),
    };
  }

  /** The five metrics as served; null before the first successful load. */
  displayedMetrics(): Metrics | null {
    return this.state?.metrics ?? null;
  }

  metricPanel(): MetricRow[] {
    if (this.state === null) return [];
    return metricRows(this.state.metrics, this.metricsBeforeEdit);
  }
}
