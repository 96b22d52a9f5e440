import type { ApiEvent, Tick, TrackSummary } from "./types.js";

export interface Shortcut {
  label: string;
  start: Tick;
  end: Tick;
}

/**
 * Sidebar navigation shortcuts: each protocol event becomes a jump
 * target so the view can zoom straight to it. Non-protocol tracks
 * contribute nothing.
 */
export function protocolShortcuts(track: TrackSummary, events: ApiEvent[]): Shortcut[] {
  if (track.kind !== "protocol") return [];
  return events.map((ev, i) => ({
    label: ev.label ?? `event ${i + 1}`,
    start: ev.start,
    end: ev.end,
  }));
}
