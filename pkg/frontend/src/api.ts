/** Typed client for the session service. Mirrors the HTTP API exactly. */

export type Cell = [number, number, number];

export interface Guidance {
  action: "connect" | "disconnect";
  cell: Cell;
}

export interface TaskView {
  session_id: string;
  task_id: string;
  kind: "intro" | "follow" | "match" | "reshape";
  phase: string;
  task_index: number;
  task_count: number;
  rotation_rpm: number;
  prototype: Cell[];
  structure: Cell[];
  guided: boolean;
  guidance: Guidance | null;
}

export interface EventAck {
  accepted: boolean;
  t: number;
  event_count: number;
  cue: string;
}

export interface TaskResult {
  task_id: string;
  kind: string;
  outcome: string | null;
  event_count: number;
  measures: {
    similarity: number;
    last_connect: number;
    derivative: number;
    zero_crossings: number;
  } | null;
}

export interface SessionResults {
  session_id: string;
  participant_code: string;
  group: string;
  phase: string;
  tasks: TaskResult[];
  total_events: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let code = "HttpError";
  let message = response.statusText;
  try {
    const body = await response.json();
    if (body?.detail?.code) {
      code = body.detail.code;
      message = body.detail.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    public baseUrl: string,
    private assessorToken?: string,
  ) {}

  private assessorHeaders(): Record<string, string> {
    return this.assessorToken ? { "x-assessor-token": this.assessorToken } : {};
  }

  async createSession(participantCode: string, group = ""): Promise<{ session_id: string }> {
    return unwrap(
      await fetch(`${this.baseUrl}/sessions`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ participant_code: participantCode, group }),
      }),
    );
  }

  async getTask(sessionId: string): Promise<TaskView> {
    return unwrap(await fetch(`${this.baseUrl}/sessions/${sessionId}/task`));
  }

  async postEvent(
    sessionId: string,
    action: "connect" | "disconnect",
    cell: Cell,
    cubeId: number,
  ): Promise<EventAck> {
    return unwrap(
      await fetch(`${this.baseUrl}/sessions/${sessionId}/events`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({
          action,
          x: cell[0],
          y: cell[1],
          z: cell[2],
          cube_id: cubeId,
          client_t: Date.now() / 1000,
        }),
      }),
    );
  }

  async advance(sessionId: string): Promise<{ phase: string; task_index: number }> {
    return unwrap(
      await fetch(`${this.baseUrl}/sessions/${sessionId}/advance`, {
        method: "POST",
        headers: this.assessorHeaders(),
      }),
    );
  }

  async abort(sessionId: string): Promise<{ phase: string; task_index: number }> {
    return unwrap(
      await fetch(`${this.baseUrl}/sessions/${sessionId}/abort`, {
        method: "POST",
        headers: this.assessorHeaders(),
      }),
    );
  }

  async results(sessionId: string): Promise<SessionResults> {
    return unwrap(
      await fetch(`${this.baseUrl}/sessions/${sessionId}/results`, {
        headers: this.assessorHeaders(),
      }),
    );
  }

  streamUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/stream`;
  }
}
