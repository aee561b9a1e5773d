/**
 * Three.js rendering of voxel structures: monoscopic perspective with the
 * prototype's continuous rotation supplying the depth cue.  Cubes are flat
 * colored with edge lines and a horizontal stripe band echoing the physical
 * blocks' alignment marking.
 */

import * as THREE from "three";
import { Cell } from "./api.js";
import { FACES } from "./participant.js";

const CUBE_COLOR = 0xd8d2c4;
const BASE_COLOR = 0xb8c4d8;
const STRIPE_COLOR = 0x2255bb;
const HIGHLIGHT_COLOR = 0x66dd66;

const cubeGeometry = new THREE.BoxGeometry(1, 1, 1);
const stripeGeometry = new THREE.BoxGeometry(1.02, 0.14, 1.02);

function makeCube(color: number, opacity = 1): THREE.Group {
  const group = new THREE.Group();
  const material = new THREE.MeshLambertMaterial({
    color,
    transparent: opacity < 1,
    opacity,
  });
  const mesh = new THREE.Mesh(cubeGeometry, material);
  mesh.name = "cube-body";
  group.add(mesh);
  group.add(
    new THREE.LineSegments(
      new THREE.EdgesGeometry(cubeGeometry),
      new THREE.LineBasicMaterial({ color: 0x333333 }),
    ),
  );
  const stripe = new THREE.Mesh(
    stripeGeometry,
    new THREE.MeshLambertMaterial({ color: STRIPE_COLOR, transparent: opacity < 1, opacity }),
  );
  group.add(stripe);
  return group;
}

export interface PanelOptions {
  background?: number;
  onFaceClick?: (cell: Cell, face: keyof typeof FACES) => void;
  onCubeClick?: (cell: Cell) => void;
}

export class VoxelPanel {
  private renderer: THREE.WebGLRenderer;
  private scene = new THREE.Scene();
  private camera: THREE.PerspectiveCamera;
  private cubesGroup = new THREE.Group();
  private raycaster = new THREE.Raycaster();
  private cellsByUuid = new Map<string, Cell>();

  constructor(
    private canvas: HTMLCanvasElement,
    private options: PanelOptions = {},
  ) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.renderer.setSize(canvas.clientWidth, canvas.clientHeight, false);
    this.scene.background = new THREE.Color(options.background ?? 0xf4f1ea);
    this.camera = new THREE.PerspectiveCamera(
      40,
      canvas.clientWidth / canvas.clientHeight,
      0.1,
      100,
    );
    this.camera.position.set(6, 7, 9);
    this.camera.lookAt(0, 1, 0);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.7));
    const sun = new THREE.DirectionalLight(0xffffff, 0.8);
    sun.position.set(5, 10, 7);
    this.scene.add(sun);
    this.scene.add(this.cubesGroup);

    if (options.onFaceClick || options.onCubeClick) {
      canvas.addEventListener("click", (ev) => this.pick(ev, "face"));
      canvas.addEventListener("contextmenu", (ev) => {
        ev.preventDefault();
        this.pick(ev, "cube");
      });
    }
  }

  /** Replace the rendered cells; the highlight pulses the guided next cube. */
  setCells(cells: Cell[], highlight: Cell | null = null): void {
    this.cubesGroup.clear();
    this.cellsByUuid.clear();
    for (const cell of cells) {
      const isBase = cell[0] === 0 && cell[1] === 0 && cell[2] === 0;
      const cube = makeCube(isBase ? BASE_COLOR : CUBE_COLOR);
      // grid z is "up" in task coordinates; three.js y is up on screen
      cube.position.set(cell[0], cell[2], cell[1]);
      this.cubesGroup.add(cube);
      const body = cube.getObjectByName("cube-body");
      if (body) this.cellsByUuid.set(body.uuid, cell);
    }
    if (highlight) {
      const ghost = makeCube(HIGHLIGHT_COLOR, 0.45);
      ghost.position.set(highlight[0], highlight[2], highlight[1]);
      this.cubesGroup.add(ghost);
    }
  }

  setRotationDeg(angleDeg: number): void {
    this.cubesGroup.rotation.y = (angleDeg * Math.PI) / 180;
  }

  render(): void {
    this.renderer.render(this.scene, this.camera);
  }

  private pick(ev: MouseEvent, mode: "face" | "cube"): void {
    const rect = this.canvas.getBoundingClientRect();
    const ndc = new THREE.Vector2(
      ((ev.clientX - rect.left) / rect.width) * 2 - 1,
      -((ev.clientY - rect.top) / rect.height) * 2 + 1,
    );
    this.raycaster.setFromCamera(ndc, this.camera);
    const bodies = [...this.cellsByUuid.keys()]
      .map((uuid) => this.cubesGroup.getObjectByProperty("uuid", uuid))
      .filter((o): o is THREE.Object3D => !!o);
    const hits = this.raycaster.intersectObjects(bodies, false);
    if (hits.length === 0) return;
    const hit = hits[0];
    const cell = this.cellsByUuid.get(hit.object.uuid);
    if (!cell) return;
    if (mode === "cube") {
      this.options.onCubeClick?.(cell);
      return;
    }
    const n = hit.face?.normal;
    if (!n) return;
    // screen-space normal back to task axes (y up on screen is z in tasks)
    const taskDir: Cell = [Math.round(n.x), Math.round(n.z), Math.round(n.y)];
    for (const [name, dir] of Object.entries(FACES)) {
      if (dir[0] === taskDir[0] && dir[1] === taskDir[1] && dir[2] === taskDir[2]) {
        this.options.onFaceClick?.(cell, name as keyof typeof FACES);
        return;
      }
    }
  }
}
