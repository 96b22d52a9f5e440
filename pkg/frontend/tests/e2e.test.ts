// End-to-end flow against a live service instance: load a 100-track
// session, render from buffers, check the client threshold recompute
// against the server bit-for-bit, seek the video from a false-positive
// block, and play a playlist consecutively.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { rowFromBuffer } from "../src/render.js";
import { thresholdIntervals } from "../src/threshold.js";
import { seekSeconds, VideoSync, type Player } from "../src/video.js";
import type { ApiEvent, SessionSummary, TrackSummary } from "../src/types.js";

const PORT = 8719;
const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

let server: ChildProcess;
let workDir: string;
let api: ApiClient;
let sid: string;
let session: SessionSummary;
let tracks: TrackSummary[];

class FakePlayer implements Player {
  currentTime = 0;
  duration = 700;
  paused = true;
  src = "";
  play() { this.paused = false; }
  pause() { this.paused = true; }
}

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const res = await fetch(`http://127.0.0.1:${PORT}/sessions/none`);
      if (res.status === 404) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("server did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "trackkit-ui-"));
  const bsxPath = join(workDir, "session.bsx");
  const gen = spawnSync("python3", [join(FIXTURES, "make_session.py"), bsxPath]);
  if (gen.status !== 0) {
    throw new Error(`fixture generation failed: ${gen.stderr}`);
  }
  server = spawn("python3", [join(FIXTURES, "run_server.py"), String(PORT)], {
    stdio: "ignore",
  });
  await waitForServer();

  api = new ApiClient(`http://127.0.0.1:${PORT}`);
  const created = await api.createSessionFromBsx(readFileSync(bsxPath));
  sid = created.id;
  session = await api.session(sid);
  tracks = await api.tracks(sid);
}, 60_000);

afterAll(() => {
  server?.kill();
  if (workDir) rmSync(workDir, { recursive: true, force: true });
});

describe("end to end", () => {
  it("loads the 100-track session", () => {
    expect(tracks).toHaveLength(100);
    expect(session.video).not.toBeNull();
    expect(tracks[0].id).toBe("WalkingJohn1.0");
    expect(tracks[0].kind).toBe("classifier");
  });

  it("renders every track from server buffers", async () => {
    const bins = 400;
    for (const t of tracks.slice(0, 10)) {
      const buf = await api.render(sid, t.id, bins);
      expect(buf.coverage).toHaveLength(bins);
      expect(buf.edges).toHaveLength(bins + 1);
      const row = rowFromBuffer(buf, t.meta);
      if (t.events > 0) expect(row.blocks.length).toBeGreaterThan(0);
      for (const b of row.blocks) {
        expect(b.x0).toBeGreaterThanOrEqual(0);
        expect(b.x1).toBeLessThanOrEqual(1);
        expect(b.opacity).toBeGreaterThanOrEqual(0.3);
        expect(b.opacity).toBeLessThanOrEqual(1.0);
      }
    }
  });

  it("windowed render matches the requested slice", async () => {
    const from = 100_000_000;
    const to = 200_000_000;
    const buf = await api.render(sid, "WalkingJohn1.0", 200, from, to);
    expect(buf.window).toEqual([from, to]);
    expect(buf.edges[0]).toBe(from);
    expect(buf.edges[buf.edges.length - 1]).toBe(to);
  });

  it("client threshold recompute matches the server bit for bit", async () => {
    const events = await api.events(sid, "WalkingJohn1.0");
    for (const theta of [0.05, 0.3, 0.55, 0.8, 0.97]) {
      const server = await api.setThreshold(sid, "WalkingJohn1.0", theta);
      const client = thresholdIntervals(events, theta);
      expect(client).toEqual(server.intervals);
    }
  });

  it("clicking a false-positive block seeks the video to the right second", async () => {
    const result = await api.command(sid, "subtract WalkingJohn1.0 WalkingMary1.0");
    expect(result.kind).toBe("new_track");
    const fpTrack = result.payload as TrackSummary;
    const fpEvents: ApiEvent[] = await api.events(sid, fpTrack.id);
    expect(fpEvents.length).toBeGreaterThan(0);

    const offset = session.video!.offset;
    const player = new FakePlayer();
    const sync = new VideoSync(player, offset);
    const block = fpEvents.find((e) => e.start > offset)!;
    const seconds = sync.seekToTick(block.start);
    expect(seconds).toBeCloseTo((block.start - offset) / 1e6, 9);
    expect(player.currentTime).toBe(seconds);

    // the same arithmetic the server uses for playlist starts
    expect(seekSeconds(block.start, offset)).toBe((block.start - offset) / 1e6);
  });

  it("plays the playlist segments consecutively in order", async () => {
    const pl = await api.playlist(sid, "WalkingMary1.0");
    expect(pl.segments.length).toBeGreaterThan(2);
    for (let i = 1; i < pl.segments.length; i++) {
      expect(pl.segments[i][1]).toBeGreaterThanOrEqual(pl.segments[i - 1][2]);
    }
    const player = new FakePlayer();
    const sync = new VideoSync(player, session.video!.offset);
    sync.playSegments(pl.segments);
    while (sync.playing) {
      player.currentTime = sync.playedSegments[sync.playedSegments.length - 1][2];
      sync.onTimeUpdate();
    }
    expect(sync.playedSegments).toEqual(pl.segments);
    expect(player.paused).toBe(true);
  });

  it("autocomplete completes a threshold target", async () => {
    const options = await api.autocomplete(sid, "threshold walk");
    expect(options).toContain("threshold WalkingJohn1.0");
  });
});
