/** Browser bootstrap: wires the controllers to the page and the 3D panels. */

import { ApiClient, TaskView } from "./api.js";
import { AssessorPanel } from "./assessor.js";
import { playCue } from "./cues.js";
import { ParticipantSession } from "./participant.js";
import { PROTOTYPE_RPM, rotationAngleDeg } from "./rotation.js";
import { VoxelPanel } from "./scene.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const api = new ApiClient(
  (window as { CUBEASSESS_API?: string }).CUBEASSESS_API ?? "http://127.0.0.1:8000",
);

let session: ParticipantSession | null = null;
let assessor: AssessorPanel | null = null;
let taskStartedAt = performance.now();
let rpm = PROTOTYPE_RPM;
let lastTaskId: string | null = null;

const prototypePanel = new VoxelPanel($("prototype-canvas") as HTMLCanvasElement);
const structurePanel = new VoxelPanel($("structure-canvas") as HTMLCanvasElement, {
  onFaceClick: (cell, face) => void session?.clickFace(cell, face),
  onCubeClick: (cell) => void session?.clickCube(cell),
});

function notice(message: string) {
  const box = $("notices");
  box.textContent = message;
  box.classList.add("visible");
  setTimeout(() => box.classList.remove("visible"), 4000);
}

function showView(view: TaskView) {
  if (view.task_id !== lastTaskId) {
    lastTaskId = view.task_id;
    taskStartedAt = performance.now();
  }
  rpm = view.rotation_rpm;
  $("task-label").textContent =
    `${view.kind} task ${view.task_index + 1}/${view.task_count} (${view.task_id})`;
  prototypePanel.setCells(view.prototype);
  structurePanel.setCells(view.structure, view.guidance?.cell ?? null);
  $("done-banner").classList.toggle("visible", session?.doneDeclared ?? false);
}

function animate() {
  const elapsed = (performance.now() - taskStartedAt) / 1000;
  prototypePanel.setRotationDeg(rotationAngleDeg(elapsed, rpm));
  prototypePanel.render();
  structurePanel.render();
  requestAnimationFrame(animate);
}

$("start-button").addEventListener("click", async () => {
  const code = ($("participant-code") as HTMLInputElement).value.trim() || "anon";
  session = await ParticipantSession.start(api, code, {
    onView: showView,
    onCue: (cue) => playCue(cue),
    onNotice: notice,
    onDone: () => $("done-banner").classList.add("visible"),
  });
  $("setup").classList.add("hidden");
  $("live").classList.remove("hidden");

  assessor = new AssessorPanel(api, session.id, {
    onPoint: () => {
      $("event-count").textContent = String(assessor!.eventCount);
      $("sparkline-path").setAttribute("d", assessor!.sparklinePath(220, 48));
    },
    onEnd: () => {
      $("assessor-status").textContent = "session ended";
    },
    onConnection: (up) => {
      $("assessor-status").textContent = up ? "live" : "reconnecting";
      ($("advance-button") as HTMLButtonElement).disabled = !up;
      ($("abort-button") as HTMLButtonElement).disabled = !up;
    },
  });
  void assessor.run();
});

$("done-button").addEventListener("click", () => session?.declareDone());

$("advance-button").addEventListener("click", async () => {
  if (!session || !assessor) return;
  await assessor.advance();
  await session.refresh().catch(() => $("task-label").textContent = "session complete");
});

$("abort-button").addEventListener("click", async () => {
  if (!session || !assessor) return;
  await assessor.abort();
  await session.refresh().catch(() => $("task-label").textContent = "session complete");
});

animate();
