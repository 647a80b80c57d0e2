/**
 * SVG editor for ground-truth graphs.
 *
 * Interaction model: click a node to select it, click "support" then a
 * second node to draw supported -> supporter, with every edit routed
 * through GraphModel's guards; illegal edits surface their reason in the
 * status bar and change nothing.  Saving PUTs the document to the backend,
 * which re-validates and owns the version counter.
 */

import { ApiClient, ApiError } from "./api.js";
import { GraphModel } from "./graphModel.js";
import { layeredLayout } from "./layout.js";
import { SceneDetail } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const W = 640;
const H = 420;

type Mode = "select" | "connect" | "reassign";

export class GraphEditor {
  model: GraphModel;
  version = 0;
  private selected: number | null = null;
  private mode: Mode = "select";
  private svg: SVGSVGElement;
  private status: HTMLElement;
  private classPicker: HTMLSelectElement;

  constructor(
    private readonly api: ApiClient,
    private readonly container: HTMLElement,
    private scene: SceneDetail,
    model: GraphModel,
  ) {
    this.model = model;
    this.container.innerHTML = "";

    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";
    toolbar.append(
      this.button("add object", () => this.addObject()),
      this.button("support →", () => this.setMode("connect")),
      this.button("reassign →", () => this.setMode("reassign")),
      this.button("hidden support", () => this.markHidden()),
      this.button("remove edge", () => this.removeEdge()),
      this.button("delete object", () => this.deleteObject()),
      this.button("save", () => void this.save()),
    );
    this.classPicker = document.createElement("select");
    for (const cls of scene.classes) {
      const opt = document.createElement("option");
      opt.value = cls;
      opt.textContent = cls;
      this.classPicker.appendChild(opt);
    }
    this.classPicker.onchange = () => this.applyClass();
    toolbar.appendChild(this.classPicker);
    this.container.appendChild(toolbar);

    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
    this.svg.setAttribute("class", "graph-canvas");
    this.container.appendChild(this.svg);

    this.status = document.createElement("div");
    this.status.className = "status-bar";
    this.container.appendChild(this.status);

    this.model.onChange(() => this.render());
    this.render();
  }

  private button(label: string, onClick: () => void): HTMLButtonElement {
    const b = document.createElement("button");
    b.textContent = label;
    b.onclick = onClick;
    return b;
  }

  say(message: string, isError = false): void {
    this.status.textContent = message;
    this.status.classList.toggle("error-state", isError);
  }

  private setMode(mode: Mode): void {
    if (this.selected === null) {
      this.say("select the supported object first", true);
      return;
    }
    this.mode = mode;
    this.say(
      mode === "connect"
        ? "now click the supporter"
        : "now click the new supporter (old edge is replaced)",
    );
  }

  private addObject(): void {
    const cls = this.classPicker.value || this.scene.classes[0];
    const v = this.model.addObject(cls);
    this.selected = v.id;
    this.say(`added ${cls} #${v.id}; connect it to its supporter`);
  }

  private markHidden(): void {
    if (this.selected === null) return this.say("select an object first", true);
    const result = this.model.markHiddenSupport(this.selected);
    this.say(result.ok ? "marked hidden support" : result.reason, !result.ok);
  }

  private removeEdge(): void {
    if (this.selected === null) return this.say("select an object first", true);
    const result = this.model.removeSupportEdge(this.selected);
    this.say(result.ok ? "support edge removed" : result.reason, !result.ok);
  }

  private deleteObject(): void {
    if (this.selected === null) return this.say("select an object first", true);
    const result = this.model.removeObject(this.selected);
    if (result.ok) this.selected = null;
    this.say(result.ok ? "object removed" : result.reason, !result.ok);
  }

  private applyClass(): void {
    if (this.selected === null) return this.say("select an object first", true);
    const result = this.model.setClass(this.selected, this.classPicker.value, this.scene.classes);
    this.say(result.ok ? `class set to ${this.classPicker.value}` : result.reason, !result.ok);
  }

  private clickVertex(id: number): void {
    if (this.mode === "select" || this.selected === null || this.selected === id) {
      this.selected = id;
      this.mode = "select";
      const v = this.model.vertex(id)!;
      if (v.kind === "object") this.classPicker.value = v.label;
      this.say(`selected ${v.label} #${id}`);
      this.render();
      return;
    }
    const child = this.selected;
    const result =
      this.mode === "connect"
        ? this.model.addSupportEdge(child, id)
        : this.model.reassignSupporter(child, id);
    this.mode = "select";
    this.say(result.ok ? "edge added" : result.reason, !result.ok);
  }

  async save(): Promise<void> {
    const ready = this.model.readyToSave();
    if (!ready.ok) {
      this.say(ready.reason, true);
      return;
    }
    try {
      const response = await this.api.saveGraph(
        this.scene.scene_id,
        this.version,
        this.model.toDoc(),
      );
      this.version = response.version;
      this.say(`saved (version ${response.version})`);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.say("someone else saved first - reload the graph and retry", true);
      } else if (err instanceof ApiError && err.status === 422) {
        this.say(`rejected by the engine: ${err.detail}`, true);
      } else {
        this.say(String(err), true);
      }
    }
  }

  render(): void {
    this.svg.innerHTML = "";
    const doc = this.model.toDoc();
    const placed = new Map(layeredLayout(doc).map((p) => [p.id, p]));
    const padY = 40;

    const pos = (id: number) => {
      const p = placed.get(id)!;
      return { x: p.x * W, y: padY + p.y * (H - 2 * padY) };
    };

    for (const [child, parent] of doc.support_edges) {
      const a = pos(child);
      const b = pos(parent);
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(a.x));
      line.setAttribute("y1", String(a.y));
      line.setAttribute("x2", String(b.x));
      line.setAttribute("y2", String(b.y));
      line.setAttribute("class", "support-edge");
      this.svg.appendChild(line);
    }

    for (const v of doc.vertices) {
      const { x, y } = pos(v.id);
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("transform", `translate(${x}, ${y})`);
      group.addEventListener("click", () => this.clickVertex(v.id));
      const shape = document.createElementNS(SVG_NS, v.kind === "root" ? "rect" : "ellipse");
      if (v.kind === "root") {
        shape.setAttribute("x", "-45");
        shape.setAttribute("y", "-16");
        shape.setAttribute("width", "90");
        shape.setAttribute("height", "32");
      } else {
        shape.setAttribute("rx", "42");
        shape.setAttribute("ry", "16");
      }
      shape.setAttribute(
        "class",
        `node node-${v.kind}` + (this.selected === v.id ? " node-selected" : ""),
      );
      group.appendChild(shape);
      const text = document.createElementNS(SVG_NS, "text");
      text.textContent = v.kind === "root" ? doc.scene_type : `${v.label} #${v.id}`;
      text.setAttribute("class", "node-label");
      text.setAttribute("text-anchor", "middle");
      text.setAttribute("dy", "4");
      group.appendChild(text);
      this.svg.appendChild(group);
    }
  }
}
