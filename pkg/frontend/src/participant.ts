/**
 * Participant-side session controller, free of any DOM or rendering
 * concerns so the same logic drives the browser scene and headless tests.
 *
 * State changes are ack-gated: a click becomes a POST, and the local
 * structure only changes once the server acknowledges the event.  On a
 * rejection the controller surfaces a notice and re-syncs from the server,
 * so a phantom cube can never appear.
 */

import { ApiClient, ApiError, Cell, TaskView } from "./api.js";
import { cueForCode, CueAsset } from "./cues.js";

export const FACES: Record<string, Cell> = {
  "+x": [1, 0, 0],
  "-x": [-1, 0, 0],
  "+y": [0, 1, 0],
  "-y": [0, -1, 0],
  "+z": [0, 0, 1],
  "-z": [0, 0, -1],
};

export const BASE_CELL: Cell = [0, 0, 0];

const key = (c: Cell) => `${c[0]},${c[1]},${c[2]}`;

export interface ParticipantHooks {
  onView?: (view: TaskView) => void;
  onCue?: (cue: CueAsset) => void;
  onNotice?: (message: string) => void;
  onDone?: () => void;
}

export class ParticipantSession {
  view: TaskView | null = null;
  doneDeclared = false;
  private cubeIds = new Map<string, number>();
  private nextCubeId = 1;

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private hooks: ParticipantHooks = {},
  ) {}

  static async start(
    api: ApiClient,
    participantCode: string,
    hooks: ParticipantHooks = {},
  ): Promise<ParticipantSession> {
    const { session_id } = await api.createSession(participantCode);
    const session = new ParticipantSession(api, session_id, hooks);
    await session.refresh();
    return session;
  }

  get id(): string {
    return this.sessionId;
  }

  get structure(): Cell[] {
    return this.view ? this.view.structure : [];
  }

  has(cell: Cell): boolean {
    return this.structure.some((c) => key(c) === key(cell));
  }

  async refresh(): Promise<TaskView> {
    const view = await this.api.getTask(this.sessionId);
    this.applyView(view);
    return view;
  }

  private applyView(view: TaskView) {
    const previousTask = this.view?.task_id;
    this.view = view;
    if (view.task_id !== previousTask) {
      // new task: cube id bookkeeping restarts with the initial structure
      this.cubeIds.clear();
      this.nextCubeId = 0;
      for (const cell of [...view.structure].sort((a, b) => key(a).localeCompare(key(b)))) {
        this.cubeIds.set(key(cell), this.nextCubeId++);
      }
      this.doneDeclared = false;
    }
    this.hooks.onView?.(view);
  }

  /** Click on a face of an existing cube: request a connect in that cell. */
  async clickFace(cube: Cell, face: keyof typeof FACES): Promise<boolean> {
    const d = FACES[face];
    const target: Cell = [cube[0] + d[0], cube[1] + d[1], cube[2] + d[2]];
    if (this.has(target)) {
      this.hooks.onNotice?.("that spot is already filled");
      return false;
    }
    const cubeId = this.nextCubeId++;
    return this.post("connect", target, cubeId);
  }

  /** Click on a cube itself: request its removal (the base never moves). */
  async clickCube(cube: Cell): Promise<boolean> {
    if (key(cube) === key(BASE_CELL)) {
      this.hooks.onNotice?.("the base cube cannot be removed");
      return false;
    }
    if (!this.has(cube)) {
      this.hooks.onNotice?.("no cube there");
      return false;
    }
    const cubeId = this.cubeIds.get(key(cube)) ?? this.nextCubeId++;
    return this.post("disconnect", cube, cubeId);
  }

  private async post(
    action: "connect" | "disconnect",
    cell: Cell,
    cubeId: number,
  ): Promise<boolean> {
    try {
      const ack = await this.api.postEvent(this.sessionId, action, cell, cubeId);
      if (action === "connect") {
        this.cubeIds.set(key(cell), cubeId);
      } else {
        this.cubeIds.delete(key(cell));
      }
      this.hooks.onCue?.(cueForCode(ack.cue));
      await this.refresh(); // structure view renders acked cells only
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.hooks.onNotice?.(`${err.code}: ${err.message}`);
        await this.refresh(); // re-sync; no phantom state
        return false;
      }
      throw err;
    }
  }

  /**
   * The participant is satisfied with the match.  This only signals the
   * assessor (who advances the session); it never self-advances.
   */
  declareDone(): void {
    this.doneDeclared = true;
    this.hooks.onDone?.();
  }
}
