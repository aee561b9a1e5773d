/**
 * End-to-end: a headless "browser session" drives the real Python service
 * through the same controller code the page uses, completes a guided task
 * (including a wrong cube and its removal), and the resulting on-disk log
 * must score to similarity 100 through the batch scorer.
 */

import { execFile, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, Cell, TaskView } from "../src/api.js";
import { AssessorPanel } from "../src/assessor.js";
import { FACES, ParticipantSession } from "../src/participant.js";

const execFileAsync = promisify(execFile);

const PYTHON = process.env.CUBEASSESS_PYTHON ?? "python3";

let server: ChildProcess;
let base: string;
let sessionsDir: string;

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address && typeof address === "object") {
        const port = address.port;
        srv.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

beforeAll(async () => {
  sessionsDir = mkdtempSync(join(tmpdir(), "cubeassess-e2e-"));
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  server = spawn(
    PYTHON,
    ["-m", "cubeassess.cli", "serve", "--listen", `127.0.0.1:${port}`, "--sessions-dir", sessionsDir],
    { stdio: "ignore" },
  );
  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      await fetch(`${base}/sessions/none/task`);
      break;
    } catch {
      if (Date.now() > deadline) throw new Error("service did not start");
      await new Promise((r) => setTimeout(r, 150));
    }
  }
});

afterAll(() => {
  server?.kill("SIGKILL");
});

function adjacentHost(structure: Cell[], target: Cell): [Cell, keyof typeof FACES] {
  for (const cube of structure) {
    for (const [name, d] of Object.entries(FACES)) {
      if (cube[0] + d[0] === target[0] && cube[1] + d[1] === target[1] && cube[2] + d[2] === target[2]) {
        return [cube, name as keyof typeof FACES];
      }
    }
  }
  throw new Error(`no structure cube adjacent to ${target}`);
}

async function followGuidance(session: ParticipantSession): Promise<number> {
  let clicks = 0;
  for (;;) {
    const view = session.view!;
    if (!view.guidance) return clicks;
    if (view.guidance.action === "connect") {
      const [host, face] = adjacentHost(view.structure, view.guidance.cell);
      expect(await session.clickFace(host, face)).toBe(true);
    } else {
      expect(await session.clickCube(view.guidance.cell)).toBe(true);
    }
    clicks += 1;
    if (clicks > 50) throw new Error("guidance did not converge");
  }
}

function* walkPayload(value: unknown): Generator<string> {
  if (Array.isArray(value)) {
    for (const v of value) yield* walkPayload(v);
  } else if (value && typeof value === "object") {
    for (const [k, v] of Object.entries(value)) {
      yield k;
      yield* walkPayload(v);
    }
  } else if (typeof value === "string") {
    yield value;
  }
}

describe("end-to-end session against the live service", () => {
  it("completes a guided task and the log scores to 100", async () => {
    const api = new ApiClient(base);
    const cues: string[] = [];
    const notices: string[] = [];
    const session = await ParticipantSession.start(api, "browser-e2e", {
      onCue: (cue) => cues.push(cue.code),
      onNotice: (m) => notices.push(m),
    });

    const intro = session.view!;
    expect(intro.kind).toBe("intro");
    expect(intro.guided).toBe(true);
    expect(intro.rotation_rpm).toBe(2.7);
    expect(intro.guidance).toEqual({ action: "connect", cell: [0, 0, 1] });
    const introPrototype = intro.prototype;

    // build the target as guided, then wander: an off-target cube goes on
    // and guidance flips to removal until the structure matches again
    expect(await followGuidance(session)).toBe(1);
    expect(session.view!.guidance).toBeNull();
    expect(await session.clickFace([0, 0, 1], "+x")).toBe(true);
    expect(session.view!.guidance).toEqual({ action: "disconnect", cell: [1, 0, 1] });
    expect(await followGuidance(session)).toBe(1);
    expect(session.view!.guidance).toBeNull();
    expect(cues).toContain("chime-connect");
    expect(cues).toContain("chime-disconnect");

    // a click into an occupied cell is blocked locally; nothing is posted
    // and no phantom cube appears
    const before = session.structure.length;
    expect(await session.clickFace([0, 0, 0], "+z")).toBe(false);
    expect(notices.some((n) => n.includes("filled"))).toBe(true);
    expect(session.structure.length).toBe(before);

    session.declareDone();
    expect(session.doneDeclared).toBe(true);

    // the assessor watches the stream and advances past the finished task
    const assessor = new AssessorPanel(api, session.id);
    const streamDone = assessor.run();
    await assessor.advance();
    await session.refresh();

    // every remaining task view must stay free of precision feedback
    while (true) {
      const view = session.view!;
      for (const token of walkPayload(view as unknown as TaskView)) {
        expect(token.toLowerCase()).not.toContain("similar");
      }
      if (["match", "reshape"].includes(view.kind)) {
        expect(view.guided).toBe(false);
        expect(view.guidance).toBeNull();
      }
      const { phase } = await assessor.abort();
      if (phase === "done") break;
      await session.refresh();
    }
    await streamDone; // stream closes with the terminal marker
    expect(assessor.ended).toBe(true);
    expect(assessor.eventCount).toBeGreaterThanOrEqual(3);
    expect(assessor.sparklinePath(220, 48).length).toBeGreaterThan(0);

    // the canonical artifact: the intro log, scored by the batch pipeline
    const results = await api.results(session.id);
    expect(results.tasks[0].outcome).toBe("completed");
    expect(results.tasks[0].measures?.similarity).toBe(100);

    const logPath = join(sessionsDir, session.id, "task_00_intro-01.jsonl");
    const protoPath = join(sessionsDir, "intro-01.txt");
    writeFileSync(protoPath, introPrototype.map((c) => c.join(" ")).join("\n") + "\n");
    const { stdout } = await execFileAsync(PYTHON, [
      "-m",
      "cubeassess.cli",
      "score",
      logPath,
      protoPath,
    ]);
    expect(stdout).toContain("similarity 100.0");
  });
});
