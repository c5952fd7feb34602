import type {
  CoefficientsResponse,
  FrameDoc,
  ModelsResponse,
  RouteSummary,
  ScenarioDoc,
  ScenarioRunDoc,
  VesselsResponse,
} from "./types.js";

/** Everything the views are allowed to ask the backend for. */
export interface Api {
  routes(): Promise<RouteSummary[]>;
  series(routeId: string, window?: "all" | "near"): Promise<FrameDoc>;
  models(routeId: string, metric?: string): Promise<ModelsResponse>;
  coefficients(routeId: string): Promise<CoefficientsResponse>;
  whatif(routeId: string, scenario: ScenarioDoc): Promise<ScenarioRunDoc>;
  history(routeId: string): Promise<ScenarioRunDoc[]>;
  vessels(routeId: string, status?: string): Promise<VesselsResponse>;
}

export class HttpApi implements Api {
  constructor(private readonly baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const res = await fetch(this.baseUrl + path);
    if (!res.ok) throw new Error(`GET ${path} failed: ${res.status}`);
    return (await res.json()) as T;
  }

  routes(): Promise<RouteSummary[]> {
    return this.get("/routes");
  }

  series(routeId: string, window: "all" | "near" = "all"): Promise<FrameDoc> {
    return this.get(`/routes/${encodeURIComponent(routeId)}/series?window=${window}`);
  }

  models(routeId: string, metric = "rmse"): Promise<ModelsResponse> {
    return this.get(`/routes/${encodeURIComponent(routeId)}/models?metric=${metric}`);
  }

  coefficients(routeId: string): Promise<CoefficientsResponse> {
    return this.get(`/routes/${encodeURIComponent(routeId)}/coefficients`);
  }

  async whatif(routeId: string, scenario: ScenarioDoc): Promise<ScenarioRunDoc> {
    const res = await fetch(`${this.baseUrl}/routes/${encodeURIComponent(routeId)}/whatif`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(scenario),
    });
    if (!res.ok) {
      const body = await res.json().catch(() => ({}));
      throw new Error(body.detail ?? `POST whatif failed: ${res.status}`);
    }
    return (await res.json()) as ScenarioRunDoc;
  }

  history(routeId: string): Promise<ScenarioRunDoc[]> {
    return this.get(`/routes/${encodeURIComponent(routeId)}/history`);
  }

  vessels(routeId: string, status = "all"): Promise<VesselsResponse> {
    return this.get(`/vessels?route=${encodeURIComponent(routeId)}&status=${status}`);
  }
}
