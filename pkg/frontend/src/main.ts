/** App shell: scene browser on the left, editor and comparison tabs right. */

import { ApiClient, ApiError } from "./api.js";
import { CompareView } from "./compareView.js";
import { GraphEditor } from "./graphEditor.js";
import { GraphModel } from "./graphModel.js";
import { SceneBrowser, renderDetections } from "./sceneBrowser.js";
import { SceneDetail } from "./types.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function openScene(api: ApiClient, scene: SceneDetail): Promise<void> {
  el("scene-title").textContent = scene.scene_id;
  renderDetections(el("scene-canvas") as HTMLCanvasElement, scene);

  let model: GraphModel;
  let version = 0;
  try {
    const stored = await api.getGraph(scene.scene_id);
    model = new GraphModel(stored.graph);
    version = stored.version;
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      model = GraphModel.empty(scene.scene_id, scene.scenes[0] ?? "others");
    } else {
      el("editor").textContent = `Failed to load the stored graph: ${String(err)}`;
      return;
    }
  }
  const editor = new GraphEditor(api, el("editor"), scene, model);
  editor.version = version;

  const compare = new CompareView(api, el("compare"));
  (el("compare-button") as HTMLButtonElement).onclick = () => void compare.show(scene.scene_id);
}

export function boot(): void {
  const api = new ApiClient("");
  const browser = new SceneBrowser(api, el("scene-list"));
  browser.onSelect = (scene) => void openScene(api, scene);
  (el("refresh-button") as HTMLButtonElement).onclick = () => void browser.refresh();
  void browser.refresh();
}

if (typeof document !== "undefined" && document.getElementById("scene-list")) {
  boot();
}
