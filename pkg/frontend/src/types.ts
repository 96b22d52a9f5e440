// Payloads of the trackkit session service. Ticks are integer
// microseconds since the session epoch.

export type Tick = number;

export interface TickInterval {
  start: Tick;
  end: Tick; // half-open [start, end)
}

export type TrackKind = "classifier" | "label" | "protocol" | "container" | "diff";

export interface TrackMeta {
  display_name: string;
  color: [number, number, number];
  visible: boolean;
  render_mode: "blocks" | "area";
  threshold: number | null;
}

export interface TrackSummary {
  id: string;
  class_label: string;
  author: string;
  version: string;
  kind: TrackKind;
  position: number;
  events: number;
  span: [Tick, Tick] | null;
  meta: TrackMeta;
}

export interface ApiEvent {
  start: Tick;
  end: Tick;
  score: number | null;
  label: string | null;
  attrs: Record<string, number | string>;
}

export interface RenderBuffer {
  window: [Tick, Tick];
  coverage: number[];
  max_score: (number | null)[];
  covered_ticks: number[];
  edges: Tick[];
}

export interface SessionSummary {
  id: string;
  domain: [Tick, Tick];
  cursor: Tick | null;
  video: { uri: string; offset: Tick } | null;
  tracks: number;
}

export type PlaylistSegment = [string, number, number]; // uri, startSec, endSec

export interface PlaylistPayload {
  segments: PlaylistSegment[];
  dropped: number;
}

export interface CommandResult {
  kind:
    | "new_track"
    | "metric_result"
    | "visibility_change"
    | "playlist"
    | "reorder"
    | "info_payload";
  payload: unknown;
}

export type RocPoint = [number, number, number | null]; // fpr, tpr, theta

export interface RocPayload {
  auc: number;
  points: RocPoint[];
}

export interface ReportPayload {
  accuracy: number | null;
  precision: number | null;
  recall: number | null;
  f1: number | null;
  containers: Record<
    string,
    { denominator: [Tick, Tick][]; numerator: [Tick, Tick][]; value: number | null }
  >;
}

export const US_PER_SECOND = 1_000_000;
