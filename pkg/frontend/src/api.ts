import type {
  ApiEvent,
  CommandResult,
  PlaylistPayload,
  RenderBuffer,
  ReportPayload,
  RocPayload,
  SessionSummary,
  Tick,
  TrackSummary,
} from "./types.js";

export class ApiError extends Error {
  code: string;
  status: number;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

async function unwrap<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let code = "http_error";
    let message = res.statusText;
    try {
      const body = await res.json();
      if (body && typeof body === "object") {
        code = body.code ?? code;
        message = body.message ?? message;
      }
    } catch {
      // non-JSON error body, keep the status text
    }
    throw new ApiError(res.status, code, message);
  }
  return res.json() as Promise<T>;
}

/**
 * Thin client over the session service. Render requests are cancellable
 * per track: a new request for the same track aborts the in-flight one,
 * so a fast zoom never paints stale buffers.
 */
export class ApiClient {
  base: string;
  private renderAborts = new Map<string, AbortController>();

  constructor(base = "") {
    this.base = base.replace(/\/$/, "");
  }

  private url(path: string): string {
    return this.base + path;
  }

  async createSessionFromBsx(data: Blob | Uint8Array): Promise<{ id: string; tracks: number; warnings: string[] }> {
    const form = new FormData();
    const blob = data instanceof Blob ? data : new Blob([data as BlobPart]);
    form.append("bsx", blob, "session.bsx");
    return unwrap(await fetch(this.url("/sessions"), { method: "POST", body: form }));
  }

  async session(sid: string): Promise<SessionSummary> {
    return unwrap(await fetch(this.url(`/sessions/${sid}`)));
  }

  async tracks(sid: string): Promise<TrackSummary[]> {
    return unwrap(await fetch(this.url(`/sessions/${sid}/tracks`)));
  }

  async events(sid: string, tid: string): Promise<ApiEvent[]> {
    return unwrap(await fetch(this.url(`/sessions/${sid}/tracks/${tid}/events`)));
  }

  async render(sid: string, tid: string, bins: number, from?: Tick, to?: Tick): Promise<RenderBuffer> {
    this.renderAborts.get(tid)?.abort();
    const ctl = new AbortController();
    this.renderAborts.set(tid, ctl);
    const params = new URLSearchParams({ bins: String(bins) });
    if (from !== undefined) params.set("from", String(from));
    if (to !== undefined) params.set("to", String(to));
    try {
      const res = await fetch(
        this.url(`/sessions/${sid}/tracks/${tid}/render?${params}`),
        { signal: ctl.signal },
      );
      return await unwrap<RenderBuffer>(res);
    } finally {
      if (this.renderAborts.get(tid) === ctl) this.renderAborts.delete(tid);
    }
  }

  async command(sid: string, text: string): Promise<CommandResult> {
    return unwrap(await fetch(this.url(`/sessions/${sid}/command`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    }));
  }

  async autocomplete(sid: string, q: string): Promise<string[]> {
    const params = new URLSearchParams({ q });
    return unwrap(await fetch(this.url(`/sessions/${sid}/autocomplete?${params}`)));
  }

  async setThreshold(sid: string, tid: string, value: number): Promise<{ track: string; threshold: number; intervals: [Tick, Tick][] }> {
    return unwrap(await fetch(this.url(`/sessions/${sid}/tracks/${tid}/threshold`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ value }),
    }));
  }

  async roc(sid: string, c: string, g: string): Promise<RocPayload> {
    const params = new URLSearchParams({ c, g });
    return unwrap(await fetch(this.url(`/sessions/${sid}/metrics/roc?${params}`)));
  }

  async report(sid: string, p: string, g: string): Promise<ReportPayload> {
    const params = new URLSearchParams({ p, g });
    return unwrap(await fetch(this.url(`/sessions/${sid}/metrics/report?${params}`)));
  }

  async playlist(sid: string, tid: string): Promise<PlaylistPayload> {
    const params = new URLSearchParams({ t: tid });
    return unwrap(await fetch(this.url(`/sessions/${sid}/playlist?${params}`)));
  }
}
