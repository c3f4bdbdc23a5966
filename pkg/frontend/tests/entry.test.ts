// The guided entry flow must be unable to produce an invalid ranking, no
// matter what the operator clicks. A seeded PRNG walks thousands of random
// legal interaction sequences and checks every emitted ranking.

import { describe, expect, it } from "vitest";
import { BallotEntry } from "../src/entry.js";

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function checkCanonical(ranking: number[], k: number): void {
  expect(ranking.length).toBeGreaterThanOrEqual(1);
  expect(ranking.length).toBeLessThanOrEqual(k);
  expect(ranking.length).not.toBe(k - 1);
  const seen = new Set(ranking);
  expect(seen.size).toBe(ranking.length);
  for (const c of ranking) {
    expect(c).toBeGreaterThanOrEqual(0);
    expect(c).toBeLessThan(k);
  }
}

describe("BallotEntry", () => {
  it("never emits an invalid ranking under random interaction", () => {
    const rand = mulberry32(20260810);
    for (let round = 0; round < 3000; round++) {
      const k = 1 + Math.floor(rand() * 6);
      const allowPartial = rand() < 0.5;
      const names = Array.from({ length: k }, (_, i) => `c${i}`);
      const entry = new BallotEntry(names, allowPartial);
      for (let step = 0; step < 20 && entry.state() === "picking"; step++) {
        const actions: string[] = ["pick"];
        if (entry.canTerminate()) actions.push("stop");
        if (entry.current().length > 0) actions.push("undo");
        const action = actions[Math.floor(rand() * actions.length)];
        if (action === "pick") {
          const remaining = entry.remaining();
          entry.pick(remaining[Math.floor(rand() * remaining.length)]);
        } else if (action === "stop") {
          entry.terminate();
        } else {
          entry.undo();
        }
      }
      if (entry.state() !== "complete") {
        // force it home: picking everything always completes
        while (entry.state() === "picking") {
          entry.pick(entry.remaining()[0]);
        }
      }
      checkCanonical(entry.ranking(), k);
    }
  });

  it("repeat picks are impossible by construction", () => {
    const entry = new BallotEntry(["A", "B", "C"], true);
    entry.pick(0);
    expect(entry.remaining()).toEqual([1, 2]);
    expect(() => entry.pick(0)).toThrow();
  });

  it("auto-completes the forced last preference and says so", () => {
    const entry = new BallotEntry(["A", "B", "C"], true);
    entry.pick(0);
    entry.pick(1);
    expect(entry.state()).toBe("complete");
    expect(entry.ranking()).toEqual([0, 1, 2]);
    expect(entry.forcedCompletion()).toBe(2);
    expect(entry.rankingNames()).toEqual(["A", "B", "C"]);
  });

  it("termination is only offered where the model has a branch for it", () => {
    const full = new BallotEntry(["A", "B", "C"], false);
    full.pick(0);
    expect(full.canTerminate()).toBe(false);

    const partial = new BallotEntry(["A", "B", "C"], true);
    expect(partial.canTerminate()).toBe(false); // no empty ballots
    partial.pick(2);
    expect(partial.canTerminate()).toBe(true);
    partial.terminate();
    expect(partial.ranking()).toEqual([2]);
  });

  it("undo reverses stops, forced completions and picks", () => {
    const entry = new BallotEntry(["A", "B", "C"], true);
    entry.pick(1);
    entry.terminate();
    entry.undo();
    expect(entry.state()).toBe("picking");
    entry.pick(0); // forces completion with C
    expect(entry.state()).toBe("complete");
    entry.undo();
    expect(entry.current()).toEqual([1]);
    entry.undo();
    expect(entry.current()).toEqual([]);
  });

  it("single-candidate elections complete on the first pick", () => {
    const entry = new BallotEntry(["Solo"], true);
    expect(entry.remaining()).toEqual([0]);
    entry.pick(0);
    expect(entry.ranking()).toEqual([0]);
  });
});
