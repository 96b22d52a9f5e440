import type { Tick } from "./types.js";

export type Modal = "none" | "roc" | "info" | "metrics";

export interface Window {
  start: Tick;
  end: Tick;
}

function clampWindow(start: number, end: number, domain: Window): Window {
  const width = Math.max(1, Math.min(Math.round(end - start), domain.end - domain.start));
  let s = Math.round(start);
  if (s < domain.start) s = domain.start;
  if (s + width > domain.end) s = domain.end - width;
  return { start: s, end: s + width };
}

/**
 * Pure view state for the timeline: what slice of the session is visible,
 * in what order the tracks stack, where the playback cursor sits, and
 * which modal (if any) is open. Zoom and pan never touch the server.
 */
export class ViewState {
  readonly domain: Window;
  visibleWindow: Window;
  trackOrder: string[];
  selectedTrack: string | null = null;
  cursor: Tick | null = null;
  modal: Modal = "none";

  constructor(domain: Window, trackOrder: string[] = []) {
    if (domain.end <= domain.start) {
      throw new Error(`empty domain [${domain.start}, ${domain.end})`);
    }
    this.domain = { ...domain };
    this.visibleWindow = { ...domain };
    this.trackOrder = [...trackOrder];
  }

  /** Zoom by `factor` (>1 zooms in) keeping `focus` at the same on-screen spot. */
  zoom(factor: number, focus?: Tick): void {
    const w = this.visibleWindow;
    const f = focus ?? (w.start + w.end) / 2;
    const frac = (f - w.start) / (w.end - w.start);
    const width = (w.end - w.start) / factor;
    this.visibleWindow = clampWindow(f - frac * width, f + (1 - frac) * width, this.domain);
  }

  pan(deltaTicks: number): void {
    const w = this.visibleWindow;
    this.visibleWindow = clampWindow(w.start + deltaTicks, w.end + deltaTicks, this.domain);
  }

  /** Jump the window to enclose [start, end), with 5% padding each side. */
  zoomTo(start: Tick, end: Tick): void {
    const pad = Math.max(1, Math.round((end - start) * 0.05));
    this.visibleWindow = clampWindow(start - pad, end + pad, this.domain);
  }

  setCursor(tick: Tick | null): void {
    if (tick === null) {
      this.cursor = null;
      return;
    }
    this.cursor = Math.min(Math.max(tick, this.domain.start), this.domain.end);
  }

  /** Drag-reorder: move the track at `from` so it lands at index `to`. */
  moveTrack(from: number, to: number): void {
    if (from < 0 || from >= this.trackOrder.length) return;
    const [id] = this.trackOrder.splice(from, 1);
    const dest = Math.min(Math.max(to, 0), this.trackOrder.length);
    this.trackOrder.splice(dest, 0, id);
  }

  /** Adopt a server-decided order (e.g. after a smart-ordering command). */
  setOrder(ids: string[]): void {
    this.trackOrder = [...ids];
  }

  openModal(modal: Modal): void {
    this.modal = modal;
  }

  closeModal(): void {
    this.modal = "none";
  }
}
