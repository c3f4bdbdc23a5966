// Guided ballot entry. At every step the auditor may only pick one of the
// still-unranked candidates, or (when partial ballots are allowed and at
// least one preference is down) explicitly stop. Picking the second-to-last
// candidate force-completes the ranking, mirroring how the engine
// canonicalizes all-but-one rankings; the UI surfaces this to the operator.
//
// By construction every emitted ranking is canonical: indices are unique and
// in range, the length is never zero, and never exactly k - 1.

export type EntryState = "picking" | "complete";

export class BallotEntry {
  private picks: number[] = [];
  private terminated = false;
  private forcedPick: number | null = null;

  constructor(readonly candidates: string[], readonly allowPartial: boolean) {
    if (candidates.length === 0) {
      throw new Error("no candidates");
    }
  }

  get k(): number {
    return this.candidates.length;
  }

  state(): EntryState {
    if (this.terminated) return "complete";
    if (this.picks.length === this.k) return "complete";
    return "picking";
  }

  /** Candidate indices still available to pick, in roster order. */
  remaining(): number[] {
    const taken = new Set(this.picks);
    const out: number[] = [];
    for (let c = 0; c < this.k; c++) {
      if (!taken.has(c)) out.push(c);
    }
    return out;
  }

  /** Stopping is offered only where the engine has a termination branch. */
  canTerminate(): boolean {
    return (
      this.allowPartial &&
      this.state() === "picking" &&
      this.picks.length >= 1 &&
      this.picks.length <= this.k - 2
    );
  }

  /** The forced last pick, when completion was automatic; for display. */
  forcedCompletion(): number | null {
    return this.forcedPick;
  }

  pick(candidate: number): void {
    if (this.state() !== "picking") {
      throw new Error("entry already complete");
    }
    if (!this.remaining().includes(candidate)) {
      throw new Error(`candidate ${candidate} is not available`);
    }
    this.picks.push(candidate);
    const left = this.remaining();
    if (left.length === 1) {
      // all but one ranked: the last preference is forced
      this.forcedPick = left[0];
      this.picks.push(left[0]);
    }
  }

  terminate(): void {
    if (!this.canTerminate()) {
      throw new Error("cannot stop here");
    }
    this.terminated = true;
  }

  undo(): void {
    if (this.terminated) {
      this.terminated = false;
      return;
    }
    if (this.forcedPick !== null) {
      this.picks.pop();
      this.forcedPick = null;
    }
    this.picks.pop();
  }

  reset(): void {
    this.picks = [];
    this.terminated = false;
    this.forcedPick = null;
  }

  current(): number[] {
    return [...this.picks];
  }

  /** The canonical ranking; only valid once state() is "complete". */
  ranking(): number[] {
    if (this.state() !== "complete") {
      throw new Error("ranking is not finished");
    }
    return [...this.picks];
  }

  rankingNames(): string[] {
    return this.ranking().map((c) => this.candidates[c]);
  }
}
