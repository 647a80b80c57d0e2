/**
 * Layered node placement mirroring the engine's graph structure: the scene
 * root alone on top, structural classes and the hidden vertex on layer one,
 * every other object one layer below its supporter.
 */

import { GraphDoc, isStructural } from "./types.js";

export interface PlacedVertex {
  id: number;
  layer: number;
  slot: number;   // position within the layer, 0-based
  x: number;      // unit coordinates in [0, 1]
  y: number;
}

export function layerOf(doc: GraphDoc, id: number, seen: Set<number> = new Set()): number {
  const vertex = doc.vertices.find((v) => v.id === id);
  if (!vertex) throw new Error(`no vertex ${id}`);
  if (vertex.kind === "root") return 0;
  if (vertex.kind === "hidden") return 1;
  if (isStructural(vertex.label)) return 1;
  const edge = doc.support_edges.find(([child]) => child === id);
  if (!edge || seen.has(id)) return 2; // unattached objects float below layer one
  seen.add(id);
  return layerOf(doc, edge[1], seen) + 1;
}

export function layeredLayout(doc: GraphDoc): PlacedVertex[] {
  const layers = new Map<number, number[]>();
  for (const v of doc.vertices) {
    const layer = layerOf(doc, v.id);
    if (!layers.has(layer)) layers.set(layer, []);
    layers.get(layer)!.push(v.id);
  }
  const depth = Math.max(...layers.keys()) + 1;
  const placed: PlacedVertex[] = [];
  for (const [layer, ids] of [...layers.entries()].sort((a, b) => a[0] - b[0])) {
    ids.sort((a, b) => a - b);
    ids.forEach((id, slot) => {
      placed.push({
        id,
        layer,
        slot,
        x: (slot + 1) / (ids.length + 1),
        y: depth === 1 ? 0.5 : layer / (depth - 1 || 1),
      });
    });
  }
  return placed;
}
