import { describe, expect, it } from "vitest";

import { GraphModel, supportEdgeDiff } from "../src/graphModel.js";
import { GraphDoc } from "../src/types.js";

function demoDoc(): GraphDoc {
  return {
    schema: "graph/v1",
    scene_id: "demo",
    scene_type: "kitchen",
    vertices: [
      { id: 0, kind: "root", label: "kitchen", bbox: null, z_range: null, attributes: [] },
      { id: 1, kind: "hidden", label: "hidden", bbox: null, z_range: null, attributes: [] },
      { id: 2, kind: "object", label: "ground", bbox: null, z_range: null, attributes: [] },
      { id: 3, kind: "object", label: "table", bbox: null, z_range: null, attributes: [] },
      { id: 4, kind: "object", label: "cup", bbox: null, z_range: null, attributes: [] },
    ],
    support_edges: [
      [3, 2],
      [4, 3],
    ],
    position_edges: [],
  };
}

describe("GraphModel editing guards", () => {
  it("adds a legal support edge", () => {
    const m = new GraphModel(demoDoc());
    const book = m.addObject("book");
    const result = m.addSupportEdge(book.id, 3);
    expect(result.ok).toBe(true);
    expect(m.supporterOf(book.id)).toBe(3);
  });

  it("blocks a second supporter and explains the invariant", () => {
    const m = new GraphModel(demoDoc());
    const result = m.addSupportEdge(4, 2); // cup already sits on the table
    expect(result.ok).toBe(false);
    if (!result.ok) expect(result.reason).toMatch(/exactly one supporter/);
    expect(m.supportEdges().filter(([c]) => c === 4)).toHaveLength(1);
  });

  it("blocks support cycles", () => {
    const m = new GraphModel(demoDoc());
    const result = m.addSupportEdge(2, 4); // ground on cup closes a cycle
    expect(result.ok).toBe(false);
    if (!result.ok) expect(result.reason).toMatch(/cycle/);
  });

  it("blocks self-support, root and hidden misuse", () => {
    const m = new GraphModel(demoDoc());
    expect(m.addSupportEdge(3, 3).ok).toBe(false);
    expect(m.addSupportEdge(3, 0).ok).toBe(false);
    expect(m.addSupportEdge(1, 2).ok).toBe(false);
  });

  it("reassigns a supporter atomically and rolls back on failure", () => {
    const m = new GraphModel(demoDoc());
    expect(m.reassignSupporter(4, 2).ok).toBe(true); // cup moves to the ground
    expect(m.supporterOf(4)).toBe(2);
    // an illegal reassignment (cycle) restores the previous edge
    const bad = m.reassignSupporter(2, 4);
    expect(bad.ok).toBe(false);
    expect(m.supporterOf(2)).toBe(null);
    expect(m.supporterOf(4)).toBe(2);
  });

  it("marks hidden support through the same guard path", () => {
    const m = new GraphModel(demoDoc());
    expect(m.markHiddenSupport(4).ok).toBe(true);
    expect(m.supporterOf(4)).toBe(m.hidden.id);
  });

  it("constrains class changes to the vocabulary", () => {
    const m = new GraphModel(demoDoc());
    const vocab = ["ground", "wall", "table", "cup", "book"];
    expect(m.setClass(4, "book", vocab).ok).toBe(true);
    expect(m.vertex(4)!.label).toBe("book");
    const bad = m.setClass(4, "spaceship", vocab);
    expect(bad.ok).toBe(false);
    expect(m.setClass(0, "table", vocab).ok).toBe(false); // root has no class
  });

  it("refuses to delete supported parents or special vertices", () => {
    const m = new GraphModel(demoDoc());
    expect(m.removeObject(3).ok).toBe(false); // table still supports the cup
    expect(m.removeObject(0).ok).toBe(false);
    expect(m.removeObject(1).ok).toBe(false);
    expect(m.removeSupportEdge(4).ok).toBe(true);
    expect(m.removeObject(4).ok).toBe(true);
    expect(m.vertex(4)).toBeUndefined();
  });

  it("reports readiness only when every object has a supporter", () => {
    const m = new GraphModel(demoDoc());
    expect(m.readyToSave().ok).toBe(true); // ground is structural, exempt
    const lamp = m.addObject("lamp");
    const notReady = m.readyToSave();
    expect(notReady.ok).toBe(false);
    if (!notReady.ok) expect(notReady.reason).toMatch(/lamp/);
    m.markHiddenSupport(lamp.id);
    expect(m.readyToSave().ok).toBe(true);
  });

  it("round-trips through toDoc without aliasing internal state", () => {
    const m = new GraphModel(demoDoc());
    const doc = m.toDoc();
    doc.support_edges.push([2, 4]);
    expect(m.supportEdges()).toHaveLength(2); // mutation stayed outside
    expect(new GraphModel(doc).supportEdges()).toHaveLength(3);
  });

  it("starts empty graphs with root and hidden only", () => {
    const m = GraphModel.empty("s1", "office");
    expect(m.vertices()).toHaveLength(2);
    expect(m.root.label).toBe("office");
    expect(m.readyToSave().ok).toBe(true);
  });
});

describe("supportEdgeDiff", () => {
  it("finds the XOR set by class labels", () => {
    const gt = demoDoc();
    const hyp = demoDoc();
    hyp.support_edges = [
      [3, 2],
      [4, 2], // cup moved from table to ground
    ];
    expect(supportEdgeDiff(hyp, gt)).toEqual([["cup", "ground"]]);
    expect(supportEdgeDiff(gt, hyp)).toEqual([["cup", "table"]]);
    expect(supportEdgeDiff(gt, gt)).toEqual([]);
  });
});
