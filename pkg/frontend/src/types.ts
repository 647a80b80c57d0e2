/** Wire types mirroring the engine's JSON schemas (docs/schemas.md). */

export type VertexKind = "root" | "hidden" | "object";

export interface GraphVertex {
  id: number;
  kind: VertexKind;
  label: string;
  bbox: [number, number, number, number] | null;
  z_range: [number, number] | null;
  attributes: string[];
}

export interface GraphDoc {
  schema: "graph/v1";
  scene_id: string;
  scene_type: string;
  vertices: GraphVertex[];
  support_edges: [number, number][];
  position_edges: [number, number, string][];
}

export interface SceneSummary {
  scene_id: string;
  has_ground_truth: boolean;
}

export interface DetectionInfo {
  id: number;
  bbox: [number, number, number, number];
  box_score: number;
  best_class: string;
}

export interface SceneDetail {
  scene_id: string;
  image_size: [number, number];
  classes: string[];
  scenes: string[];
  detections: DetectionInfo[];
  image_png: string | null;
}

export interface StoredGraph {
  version: number;
  graph: GraphDoc;
}

export interface InferenceResponse {
  graph: GraphDoc;
  energy: number;
  scene_type: string;
}

export interface CompareResponse {
  cheeger: number;
  spectral: number;
  naive: number;
  flags: string[];
  hypothesis: GraphDoc;
  ground_truth: GraphDoc;
}

export const STRUCTURAL_CLASSES = ["ground", "wall", "ceiling"] as const;

export function isStructural(label: string): boolean {
  return (STRUCTURAL_CLASSES as readonly string[]).includes(label);
}
