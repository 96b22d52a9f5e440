import type { ApiEvent, TrackSummary } from "./types.js";
import { US_PER_SECOND } from "./types.js";

export interface TooltipLine {
  key: string;
  value: string;
}

function fmtSeconds(ticks: number): string {
  const s = ticks / US_PER_SECOND;
  return s >= 10 ? `${s.toFixed(1)} s` : `${s.toFixed(3)} s`;
}

/**
 * Lines for the hover tooltip: every attribute of the event, plus its
 * duration and the track's author. Score and label appear when present.
 */
export function tooltipLines(event: ApiEvent, track: TrackSummary): TooltipLine[] {
  const lines: TooltipLine[] = [];
  if (event.label !== null) lines.push({ key: "label", value: event.label });
  if (event.score !== null) lines.push({ key: "score", value: event.score.toFixed(3) });
  for (const key of Object.keys(event.attrs).sort()) {
    lines.push({ key, value: String(event.attrs[key]) });
  }
  lines.push({ key: "duration", value: fmtSeconds(event.end - event.start) });
  lines.push({ key: "author", value: track.author });
  return lines;
}
