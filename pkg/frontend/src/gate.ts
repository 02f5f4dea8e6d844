/**
 * Submit lockout: exactly one attempt command may be in flight.  The gate
 * locks when a submit is accepted and releases on feedback, an error, a
 * disconnect, or the local timeout, so double-clicks and submits after the
 * race is over never reach the bridge.
 */

import type { BridgeEvent, Command } from "./protocol.js";
import type { ViewState } from "./viewModel.js";

export type SubmitRejection =
  | "locked"
  | "not-connected"
  | "race-finished"
  | "missing-selection";

export class SubmitGate {
  private lockedFlag = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(private timeoutMs = 15000) {}

  get locked(): boolean {
    return this.lockedFlag;
  }

  /** Why a submit would be rejected right now, or null if allowed. */
  rejection(state: ViewState): SubmitRejection | null {
    if (this.lockedFlag) return "locked";
    if (!state.connected) return "not-connected";
    if (state.game.winner !== null) return "race-finished";
    if (!state.target || !state.modality) return "missing-selection";
    return null;
  }

  /** Returns the command to send, or null when the submit is swallowed. */
  trySubmit(state: ViewState, media: string): Command | null {
    if (this.rejection(state) !== null) return null;
    this.lockedFlag = true;
    this.armTimer();
    return { type: "submit_attempt", media };
  }

  /** Feed every bridge event through the gate so it can release the lock. */
  onEvent(event: BridgeEvent): void {
    if (event.type === "feedback" || event.type === "error" || event.type === "disconnected") {
      this.release();
    }
  }

  release(): void {
    this.lockedFlag = false;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  private armTimer(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => this.release(), this.timeoutMs);
  }
}
