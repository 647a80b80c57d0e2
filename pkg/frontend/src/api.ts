/**
 * Typed client over the engine's JSON endpoints. All numbers displayed in
 * the UI (energies, distances) come from these calls; nothing is recomputed
 * client-side.
 */

import {
  CompareResponse,
  GraphDoc,
  InferenceResponse,
  SceneDetail,
  SceneSummary,
  StoredGraph,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + path, init);
    } catch (err) {
      throw new ApiError(0, `backend unreachable (${String(err)})`);
    }
    const body = await response.text();
    if (!response.ok) {
      let detail = body;
      try {
        detail = JSON.parse(body).detail ?? body;
      } catch {
        /* plain-text error */
      }
      throw new ApiError(response.status, detail);
    }
    return JSON.parse(body) as T;
  }

  listScenes(): Promise<SceneSummary[]> {
    return this.request("/api/scenes");
  }

  getScene(sceneId: string): Promise<SceneDetail> {
    return this.request(`/api/scenes/${encodeURIComponent(sceneId)}`);
  }

  getGraph(sceneId: string): Promise<StoredGraph> {
    return this.request(`/api/scenes/${encodeURIComponent(sceneId)}/graph`);
  }

  saveGraph(sceneId: string, version: number, graph: GraphDoc): Promise<{ version: number }> {
    return this.request(`/api/scenes/${encodeURIComponent(sceneId)}/graph`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ version, graph }),
    });
  }

  infer(sceneId: string): Promise<InferenceResponse> {
    return this.request(`/api/scenes/${encodeURIComponent(sceneId)}/infer`, { method: "POST" });
  }

  compare(sceneId: string): Promise<CompareResponse> {
    return this.request(`/api/scenes/${encodeURIComponent(sceneId)}/compare`);
  }

  compareGraphFiles(
    hypothesis: string,
    groundTruth: string,
  ): Promise<{ cheeger: number; spectral: number; naive: number; flags: string[] }> {
    const params = new URLSearchParams({ hypothesis, ground_truth: groundTruth });
    return this.request(`/api/compare-graphs?${params}`);
  }
}
