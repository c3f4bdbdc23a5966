// Minimal observable state holder; the service owns all real state.

import type { BallotRecord, SessionView } from "./types.js";

export interface AppState {
  session: SessionView | null;
  batch: BallotRecord[];
  busy: boolean;
  error: string | null;
  notice: string | null;
}

type Listener = (state: AppState) => void;

export class Store {
  private state: AppState = { session: null, batch: [], busy: false, error: null, notice: null };
  private listeners: Listener[] = [];

  get(): AppState {
    return this.state;
  }

  set(patch: Partial<AppState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }
}
