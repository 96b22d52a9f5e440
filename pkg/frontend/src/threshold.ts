import type { ApiEvent, Tick } from "./types.js";

/**
 * Recompute a classifier's active intervals at threshold `theta` from
 * cached events, matching the server's recompute exactly: keep events
 * with score >= theta, merge touching or overlapping spans.
 */
export function thresholdIntervals(events: ApiEvent[], theta: number): [Tick, Tick][] {
  const spans: [Tick, Tick][] = [];
  for (const ev of events) {
    const score = ev.score ?? 1.0;
    if (score >= theta) spans.push([ev.start, ev.end]);
  }
  spans.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  const out: [Tick, Tick][] = [];
  for (const [s, e] of spans) {
    const last = out[out.length - 1];
    if (last && s <= last[1]) {
      if (e > last[1]) last[1] = e;
    } else {
      out.push([s, e]);
    }
  }
  return out;
}

export interface ThresholdPersist {
  (trackId: string, value: number): Promise<unknown>;
}

/**
 * Drag lifecycle for the red threshold line. Moves recompute blocks
 * locally from cached events; only the release persists, with exactly
 * one server call.
 */
export class ThresholdDrag {
  readonly trackId: string;
  private events: ApiEvent[];
  private persist: ThresholdPersist;
  value: number;
  intervals: [Tick, Tick][];
  active = false;
  postCount = 0;

  constructor(trackId: string, events: ApiEvent[], initial: number, persist: ThresholdPersist) {
    this.trackId = trackId;
    this.events = events;
    this.persist = persist;
    this.value = initial;
    this.intervals = thresholdIntervals(events, initial);
  }

  begin(): void {
    this.active = true;
  }

  move(theta: number): [Tick, Tick][] {
    if (!this.active) throw new Error("move without begin");
    this.value = Math.min(Math.max(theta, 0), 1);
    this.intervals = thresholdIntervals(this.events, this.value);
    return this.intervals;
  }

  async release(): Promise<[Tick, Tick][]> {
    if (!this.active) throw new Error("release without begin");
    this.active = false;
    this.postCount += 1;
    await this.persist(this.trackId, this.value);
    return this.intervals;
  }
}
