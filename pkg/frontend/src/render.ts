import type { ApiEvent, RenderBuffer, Tick, TrackMeta } from "./types.js";
import type { Window } from "./viewState.js";

export const RAW_EVENT_LIMIT = 5000;

export interface Block {
  x0: number; // fraction of the visible window, in [0, 1]
  x1: number;
  opacity: number;
  color: [number, number, number];
}

export interface AreaPoint {
  x: number; // window fraction
  score: number;
}

export interface DrawnRow {
  mode: "blocks" | "area";
  blocks: Block[];
  area: AreaPoint[];
  thresholdLine: number | null; // y position in score units, red line in area mode
}

/**
 * Score-to-opacity encoding for blocks: linear from 0.3 at the threshold
 * to 1.0 at score 1, clamped. Unscored events (label tracks) and the
 * degenerate theta = 1 render fully opaque.
 */
export function blockOpacity(score: number | null, theta: number | null): number {
  if (score === null) return 1.0;
  const t = theta ?? 0.0;
  if (t >= 1.0) return 1.0;
  const o = 0.3 + 0.7 * (score - t) / (1 - t);
  return Math.min(1.0, Math.max(0.3, o));
}

/** Pick the data source for a row: raw events stay exact up to a cap. */
export function useRawEvents(visibleEventCount: number): boolean {
  return visibleEventCount <= RAW_EVENT_LIMIT;
}

function frac(tick: Tick, w: Window): number {
  return (tick - w.start) / (w.end - w.start);
}

/** Build a row from a server render buffer (downsampled path). */
export function rowFromBuffer(buf: RenderBuffer, meta: TrackMeta): DrawnRow {
  const w: Window = { start: buf.window[0], end: buf.window[1] };
  const blocks: Block[] = [];
  const area: AreaPoint[] = [];
  for (let i = 0; i < buf.coverage.length; i++) {
    if (buf.coverage[i] <= 0) continue;
    const score = buf.max_score[i];
    blocks.push({
      x0: frac(buf.edges[i], w),
      x1: frac(buf.edges[i + 1], w),
      opacity: blockOpacity(score, meta.threshold),
      color: meta.color,
    });
    if (score !== null) {
      area.push({ x: (frac(buf.edges[i], w) + frac(buf.edges[i + 1], w)) / 2, score });
    }
  }
  return {
    mode: meta.render_mode,
    blocks,
    area,
    thresholdLine: meta.render_mode === "area" ? meta.threshold : null,
  };
}

/** Build a row straight from events (exact path, below the buffer cap). */
export function rowFromEvents(events: ApiEvent[], window: Window, meta: TrackMeta): DrawnRow {
  const blocks: Block[] = [];
  const area: AreaPoint[] = [];
  const theta = meta.threshold;
  for (const ev of events) {
    if (ev.end <= window.start || ev.start >= window.end) continue;
    const x0 = Math.max(0, frac(ev.start, window));
    const x1 = Math.min(1, frac(ev.end, window));
    if (theta !== null && ev.score !== null && ev.score < theta) {
      // below threshold: invisible in blocks mode, still a point in area mode
    } else {
      blocks.push({ x0, x1, opacity: blockOpacity(ev.score, theta), color: meta.color });
    }
    if (ev.score !== null) area.push({ x: (x0 + x1) / 2, score: ev.score });
  }
  return {
    mode: meta.render_mode,
    blocks,
    area,
    thresholdLine: meta.render_mode === "area" ? theta : null,
  };
}

/** Minimal 2D surface so drawing is testable without a browser canvas. */
export interface DrawSurface {
  fillRect(x: number, y: number, w: number, h: number, rgba: [number, number, number, number]): void;
  line(x0: number, y0: number, x1: number, y1: number, rgba: [number, number, number, number]): void;
}

export const THRESHOLD_LINE_COLOR: [number, number, number] = [220, 38, 38];

/** Paint one row into a horizontal strip [top, top+height) of the surface. */
export function paintRow(row: DrawnRow, surface: DrawSurface, widthPx: number, top: number, height: number): void {
  if (row.mode === "blocks") {
    for (const b of row.blocks) {
      surface.fillRect(b.x0 * widthPx, top, (b.x1 - b.x0) * widthPx, height,
        [b.color[0], b.color[1], b.color[2], b.opacity]);
    }
    return;
  }
  const color = row.blocks[0]?.color ?? [100, 100, 100];
  for (let i = 1; i < row.area.length; i++) {
    const a = row.area[i - 1];
    const b = row.area[i];
    surface.line(a.x * widthPx, top + (1 - a.score) * height,
      b.x * widthPx, top + (1 - b.score) * height,
      [color[0], color[1], color[2], 1.0]);
  }
  if (row.thresholdLine !== null) {
    const y = top + (1 - row.thresholdLine) * height;
    surface.line(0, y, widthPx, y, [...THRESHOLD_LINE_COLOR, 1.0]);
  }
}
