import type { PlaylistSegment, Tick } from "./types.js";
import { US_PER_SECOND } from "./types.js";

/** Minimal player surface; a real <video> element satisfies it. */
export interface Player {
  currentTime: number; // seconds
  duration: number; // seconds, NaN until metadata loads
  paused: boolean;
  src: string;
  play(): void;
  pause(): void;
}

/** Seconds into the video for a timeline tick, given the video offset. */
export function seekSeconds(tick: Tick, offsetTicks: Tick): number {
  return (tick - offsetTicks) / US_PER_SECOND;
}

/** Timeline tick for a video position, the inverse of seekSeconds. */
export function tickForSeconds(seconds: number, offsetTicks: Tick): Tick {
  return Math.round(seconds * US_PER_SECOND) + offsetTicks;
}

export interface BannerSink {
  (message: string): void;
}

/**
 * Keeps the floating video window and the timeline cursor in sync.
 * Click-to-seek, consecutive playlist playback, and cursor clamping at
 * the video bounds all live here; load failures only raise a banner.
 */
export class VideoSync {
  player: Player;
  offsetTicks: Tick;
  private banner: BannerSink;
  private queue: PlaylistSegment[] = [];
  private queueIndex = -1;
  playedSegments: PlaylistSegment[] = [];

  constructor(player: Player, offsetTicks: Tick, banner: BannerSink = () => {}) {
    this.player = player;
    this.offsetTicks = offsetTicks;
    this.banner = banner;
  }

  /** Clicking a block seeks the player to the block's start. */
  seekToTick(tick: Tick): number {
    const raw = seekSeconds(tick, this.offsetTicks);
    const t = this.clampSeconds(raw);
    this.player.currentTime = t;
    if (t !== raw) this.player.pause();
    return t;
  }

  private clampSeconds(t: number): number {
    if (t < 0) return 0;
    const dur = this.player.duration;
    if (Number.isFinite(dur) && t > dur) return dur;
    return t;
  }

  /** Timeline cursor position for the current playback time. */
  cursorTick(): Tick {
    return tickForSeconds(this.player.currentTime, this.offsetTicks);
  }

  playSegments(segments: PlaylistSegment[]): void {
    this.queue = [...segments];
    this.queueIndex = -1;
    this.playedSegments = [];
    this.advance();
  }

  private advance(): void {
    this.queueIndex += 1;
    if (this.queueIndex >= this.queue.length) {
      this.player.pause();
      return;
    }
    const seg = this.queue[this.queueIndex];
    const [uri, start] = seg;
    if (this.player.src !== uri) {
      this.player.src = uri;
      if (this.player.src !== uri) {
        this.banner(`failed to load video ${uri}`);
        this.advance();
        return;
      }
    }
    this.player.currentTime = Math.max(0, start);
    this.playedSegments.push(seg);
    this.player.play();
  }

  /** Hook this to the player's timeupdate event. */
  onTimeUpdate(): void {
    if (this.queueIndex < 0 || this.queueIndex >= this.queue.length) return;
    const [, , end] = this.queue[this.queueIndex];
    if (this.player.currentTime >= end) this.advance();
  }

  get playing(): boolean {
    return this.queueIndex >= 0 && this.queueIndex < this.queue.length;
  }
}
