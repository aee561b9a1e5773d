import { describe, expect, it } from "vitest";

import { ApiError, Cell, TaskView } from "../src/api.js";
import { ParticipantSession } from "../src/participant.js";

function view(structure: Cell[], overrides: Partial<TaskView> = {}): TaskView {
  return {
    session_id: "s",
    task_id: "t1",
    kind: "match",
    phase: "building",
    task_index: 0,
    task_count: 1,
    rotation_rpm: 2.7,
    prototype: [[0, 0, 0], [0, 0, 1]],
    structure,
    guided: false,
    guidance: null,
    ...overrides,
  };
}

interface Call {
  action: string;
  cell: Cell;
  cubeId: number;
}

/** Server double: scripted task views plus a post log. */
function fakeApi(script: { reject?: ApiError } = {}) {
  const calls: Call[] = [];
  let structure: Cell[] = [[0, 0, 0]];
  return {
    calls,
    setStructure(cells: Cell[]) {
      structure = cells;
    },
    async createSession() {
      return { session_id: "s" };
    },
    async getTask() {
      return view(structure);
    },
    async postEvent(_sid: string, action: "connect" | "disconnect", cell: Cell, cubeId: number) {
      if (script.reject) throw script.reject;
      calls.push({ action, cell, cubeId });
      if (action === "connect") structure = [...structure, cell];
      else structure = structure.filter((c) => c.join() !== cell.join());
      return {
        accepted: true,
        t: calls.length,
        event_count: calls.length,
        cue: action === "connect" ? "chime-connect" : "chime-disconnect",
      };
    },
  };
}

describe("participant controller", () => {
  it("posts a connect for the cell behind a clicked face", async () => {
    const api = fakeApi();
    const session = await ParticipantSession.start(api as never, "p");
    const ok = await session.clickFace([0, 0, 0], "+z");
    expect(ok).toBe(true);
    expect(api.calls).toEqual([{ action: "connect", cell: [0, 0, 1], cubeId: 1 }]);
    expect(session.has([0, 0, 1])).toBe(true); // only after the ack + refresh
  });

  it("blocks clicks into already-filled cells locally", async () => {
    const api = fakeApi();
    const notices: string[] = [];
    const session = await ParticipantSession.start(api as never, "p", {
      onNotice: (m) => notices.push(m),
    });
    await session.clickFace([0, 0, 0], "+z");
    const ok = await session.clickFace([0, 0, 0], "+z");
    expect(ok).toBe(false);
    expect(api.calls).toHaveLength(1);
    expect(notices.some((n) => n.includes("filled"))).toBe(true);
  });

  it("never posts a removal of the base cube", async () => {
    const api = fakeApi();
    const notices: string[] = [];
    const session = await ParticipantSession.start(api as never, "p", {
      onNotice: (m) => notices.push(m),
    });
    const ok = await session.clickCube([0, 0, 0]);
    expect(ok).toBe(false);
    expect(api.calls).toHaveLength(0);
    expect(notices[0]).toMatch(/base cube/);
  });

  it("reuses the acked cube id when disconnecting", async () => {
    const api = fakeApi();
    const session = await ParticipantSession.start(api as never, "p");
    await session.clickFace([0, 0, 0], "+x");
    await session.clickCube([1, 0, 0]);
    expect(api.calls[1]).toEqual({ action: "disconnect", cell: [1, 0, 0], cubeId: 1 });
  });

  it("re-syncs from the server on a rejection, leaving no phantom cube", async () => {
    const api = fakeApi({ reject: new ApiError(409, "CellOccupied", "taken") });
    const notices: string[] = [];
    const session = await ParticipantSession.start(api as never, "p", {
      onNotice: (m) => notices.push(m),
    });
    api.setStructure([[0, 0, 0], [0, 1, 0]]); // another actor raced us
    const ok = await session.clickFace([0, 0, 0], "+y");
    expect(ok).toBe(false);
    expect(notices[0]).toMatch(/CellOccupied/);
    // the refresh picked up the authoritative server state
    expect(session.structure).toEqual([[0, 0, 0], [0, 1, 0]]);
  });

  it("plays the cue the server names", async () => {
    const api = fakeApi();
    const cues: string[] = [];
    const session = await ParticipantSession.start(api as never, "p", {
      onCue: (cue) => cues.push(cue.code),
    });
    await session.clickFace([0, 0, 0], "+z");
    await session.clickCube([0, 0, 1]);
    expect(cues).toEqual(["chime-connect", "chime-disconnect"]);
  });

  it("done is a signal, not a state change", async () => {
    const api = fakeApi();
    let done = false;
    const session = await ParticipantSession.start(api as never, "p", {
      onDone: () => (done = true),
    });
    session.declareDone();
    expect(done).toBe(true);
    expect(api.calls).toHaveLength(0);
  });
});
