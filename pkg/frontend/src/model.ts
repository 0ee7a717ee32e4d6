/** View-model: the latest fetched view plus display state.
 *
 * Probabilities and entropies are always taken verbatim from the last
 * fetched view; this layer never recomputes them. Optimistic updates are
 * forbidden: every mutation refetches through the response body.
 */

import { ApiError, SessionApi } from "./api.js";
import type { SessionView } from "./types.js";

export type PrimaryAction = "answer" | "step" | "none";

export interface EntropyPoint {
  t: number;
  entropy: number;
}

export class SessionViewModel {
  view: SessionView | null = null;
  entropyHistory: EntropyPoint[] = [];
  pendingInput = "";
  banner: string | null = null;
  busy = false;

  constructor(
    private api: SessionApi,
    public sessionId: string,
  ) {}

  /** Exactly one primary action is available at any time. */
  primaryAction(): PrimaryAction {
    if (!this.view || this.busy) return "none";
    if (this.view.status !== "running") return "none";
    return this.view.pending ? "answer" : "step";
  }

  expandEnabled(): boolean {
    return (
      !this.busy &&
      this.view !== null &&
      this.view.status === "running" &&
      !this.view.expand_capped
    );
  }

  private accept(view: SessionView): void {
    this.view = view;
    this.banner = null;
    const last = this.entropyHistory[this.entropyHistory.length - 1];
    if (!last || last.t !== view.t || last.entropy !== view.entropy) {
      this.entropyHistory.push({ t: view.t, entropy: view.entropy });
    }
  }

  async refresh(): Promise<void> {
    try {
      this.accept(await this.api.getView(this.sessionId));
    } catch (err) {
      this.banner = "stale data: could not reach the session service";
      throw err;
    }
  }

  async stepLoop(): Promise<void> {
    if (this.primaryAction() !== "step") return;
    this.busy = true;
    try {
      this.accept(await this.api.step(this.sessionId));
    } catch (err) {
      await this.handleMutationError(err);
    } finally {
      this.busy = false;
    }
  }

  /** Sends the typed free-form answer; the text survives a failed attempt. */
  async submitAnswer(): Promise<void> {
    const text = this.pendingInput.trim();
    if (!text || this.primaryAction() !== "answer") return; // client-side block
    this.busy = true;
    try {
      this.accept(await this.api.answer(this.sessionId, text));
      this.pendingInput = "";
    } catch (err) {
      await this.handleMutationError(err);
    } finally {
      this.busy = false;
    }
  }

  async forceExpand(): Promise<void> {
    if (!this.expandEnabled()) return;
    this.busy = true;
    try {
      this.accept(await this.api.expand(this.sessionId));
    } catch (err) {
      await this.handleMutationError(err);
    } finally {
      this.busy = false;
    }
  }

  private async handleMutationError(err: unknown): Promise<void> {
    if (err instanceof ApiError && err.status === 409) {
      this.banner = "session advanced elsewhere; refreshed";
      await this.refresh();
      this.banner = "session advanced elsewhere; refreshed";
      return;
    }
    if (err instanceof ApiError && err.status === 502) {
      // elicitation hiccup: keep the typed text so the user can retry
      this.banner = "the service could not process that; try again";
      return;
    }
    this.banner = "request failed; data may be stale";
    throw err;
  }
}
