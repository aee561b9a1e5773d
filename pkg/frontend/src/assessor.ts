/**
 * Assessor panel controller: task menu state, advance/abort, and a live
 * similarity sparkline fed by the server-sent-event stream.  On stream
 * loss it reconnects with backoff; the server replays history on
 * subscribe, so points are merged by sequence number and the sparkline
 * never double-counts.
 */

import { ApiClient } from "./api.js";
import { readSse } from "./sse.js";

export interface TracePoint {
  seq: number;
  t: number;
  similarity: number;
  task_id: string;
}

export interface AssessorHooks {
  onPoint?: (point: TracePoint) => void;
  onEnd?: () => void;
  onConnection?: (up: boolean) => void;
}

export class AssessorPanel {
  points: TracePoint[] = [];
  connected = false;
  ended = false;

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private hooks: AssessorHooks = {},
    private backoffMs = 500,
    private maxBackoffMs = 8000,
  ) {}

  get eventCount(): number {
    return this.points.length;
  }

  async advance() {
    return this.api.advance(this.sessionId);
  }

  async abort() {
    return this.api.abort(this.sessionId);
  }

  async results() {
    return this.api.results(this.sessionId);
  }

  private addPoint(point: TracePoint) {
    if (this.points.some((p) => p.seq === point.seq)) return;
    this.points.push(point);
    this.points.sort((a, b) => a.seq - b.seq);
    this.hooks.onPoint?.(point);
  }

  /** Consume the stream until the session ends; reconnects on loss. */
  async run(signal?: AbortSignal): Promise<void> {
    let backoff = this.backoffMs;
    while (!this.ended && !signal?.aborted) {
      try {
        this.connected = true;
        this.hooks.onConnection?.(true);
        for await (const message of readSse(this.api.streamUrl(this.sessionId), signal)) {
          backoff = this.backoffMs; // healthy stream resets the backoff
          if (message.event === "end") {
            this.ended = true;
            this.hooks.onEnd?.();
            return;
          }
          this.addPoint(JSON.parse(message.data) as TracePoint);
        }
      } catch {
        // fall through to reconnect
      }
      this.connected = false;
      this.hooks.onConnection?.(false);
      if (signal?.aborted || this.ended) return;
      await new Promise((resolve) => setTimeout(resolve, backoff));
      backoff = Math.min(backoff * 2, this.maxBackoffMs);
    }
  }

  /** SVG path for a similarity-vs-time sparkline, one vertex per event. */
  sparklinePath(width: number, height: number): string {
    if (this.points.length === 0) return "";
    const tMax = Math.max(this.points[this.points.length - 1].t, 1e-9);
    const parts = this.points.map((p, i) => {
      const x = (p.t / tMax) * width;
      // similarity spans [-100, 100]; flip so up means better
      const y = height - ((p.similarity + 100) / 200) * height;
      return `${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`;
    });
    return parts.join(" ");
  }
}
