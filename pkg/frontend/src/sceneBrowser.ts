/** Scene list plus image view with detection overlays. */

import { ApiClient, ApiError } from "./api.js";
import { SceneDetail } from "./types.js";

export class SceneBrowser {
  private container: HTMLElement;
  onSelect: (scene: SceneDetail) => void = () => {};

  constructor(
    private readonly api: ApiClient,
    root: HTMLElement,
  ) {
    this.container = root;
  }

  async refresh(): Promise<void> {
    this.container.innerHTML = "";
    const list = document.createElement("ul");
    list.className = "scene-list";
    try {
      const scenes = await this.api.listScenes();
      if (scenes.length === 0) {
        this.container.textContent = "No scenes in the configured directory.";
        return;
      }
      for (const scene of scenes) {
        const item = document.createElement("li");
        const button = document.createElement("button");
        button.textContent = scene.scene_id + (scene.has_ground_truth ? " ✓" : "");
        button.dataset.sceneId = scene.scene_id;
        button.onclick = () => this.open(scene.scene_id);
        item.appendChild(button);
        list.appendChild(item);
      }
      this.container.appendChild(list);
    } catch (err) {
      this.showError(err);
    }
  }

  private showError(err: unknown): void {
    const box = document.createElement("div");
    box.className = "error-state";
    box.textContent =
      err instanceof ApiError && err.status === 0
        ? "Backend unreachable - is `supportgraph serve` running?"
        : `Failed to load scenes: ${String(err)}`;
    this.container.appendChild(box);
  }

  private async open(sceneId: string): Promise<void> {
    try {
      const detail = await this.api.getScene(sceneId);
      this.onSelect(detail);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        const note = document.createElement("div");
        note.className = "error-state";
        note.textContent = `Scene '${sceneId}' no longer exists; refresh the list.`;
        this.container.appendChild(note);
        return;
      }
      this.showError(err);
    }
  }
}

/** Draw the scene image (when present) and one labelled box per detection. */
export function renderDetections(canvas: HTMLCanvasElement, scene: SceneDetail): void {
  const [height, width] = scene.image_size;
  const scale = Math.min(480 / width, 360 / height, 16);
  canvas.width = width * scale;
  canvas.height = height * scale;
  const ctx = canvas.getContext("2d")!;
  ctx.fillStyle = "#202830";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  const drawBoxes = () => {
    ctx.lineWidth = 2;
    ctx.font = "12px sans-serif";
    scene.detections.forEach((det, k) => {
      const [u0, v0, u1, v1] = det.bbox;
      ctx.strokeStyle = `hsl(${(k * 53) % 360} 80% 60%)`;
      ctx.strokeRect(u0 * scale, v0 * scale, (u1 - u0) * scale, (v1 - v0) * scale);
      ctx.fillStyle = ctx.strokeStyle;
      ctx.fillText(`${det.id}:${det.best_class}`, u0 * scale + 2, v0 * scale + 12);
    });
  };

  if (scene.image_png) {
    const img = new Image();
    img.onload = () => {
      ctx.imageSmoothingEnabled = false;
      ctx.drawImage(img, 0, 0, canvas.width, canvas.height);
      drawBoxes();
    };
    img.src = `data:image/png;base64,${scene.image_png}`;
  } else {
    drawBoxes();
  }
}
