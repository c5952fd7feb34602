/** Wire types mirroring the service's JSON schemas. */

export type ModelKind = "mlr" | "arimax" | "vecm" | "lstm";

export const MODEL_KINDS: ModelKind[] = ["mlr", "arimax", "vecm", "lstm"];

export interface DataSpan {
  start: string;
  end: string;
  weeks: number;
}

export interface RouteSummary {
  route_id: string;
  target: string;
  variables: string[];
  exogenous: string[];
  fitted_models: ModelKind[];
  data_span: DataSpan;
}

export interface FrameDoc {
  index: string[];
  variables: string[];
  values: (number | null)[][];
}

export interface ScorecardDoc {
  model_kind: ModelKind;
  rmse: number;
  mae: number;
  mape: number | null;
  n_folds: number;
  per_fold_errors: number[];
}

export interface ModelsResponse {
  metric: string;
  scorecards: ScorecardDoc[];
  ranking: ModelKind[];
}

export interface ImpactDoc {
  variable: string;
  mean_impact: number | null;
  std_impact: number | null;
  available: boolean;
}

export interface CoefficientsResponse {
  model_kind: ModelKind;
  impacts: ImpactDoc[];
}

/** step/value pairs as sent on the wire: [step, value] */
export type PerturbationPoint = [number, number];

export interface ScenarioDoc {
  route_id: string;
  horizon: number;
  forward_window?: number;
  perturbations: Record<string, PerturbationPoint[]>;
  model_selection?: ModelKind[];
}

export interface ForecastDoc {
  model_kind: ModelKind;
  horizon: number;
  values: number[];
  origin: string;
}

export interface ScenarioRunDoc {
  run_id: number;
  created_at: string;
  scenario: Required<ScenarioDoc>;
  baseline: Record<string, ForecastDoc>;
  whatif: Record<string, ForecastDoc>;
  diff: Record<string, number[]>;
  mean_diff_per_model: Record<string, number>;
  overall_mean_diff: number;
}

export interface VesselDoc {
  imo: number;
  timestamp: string;
  lat: number;
  lon: number;
  heading: number;
  speed_knots: number;
  cargo_status: "ballast" | "laden";
}

export interface VesselsResponse {
  vessels: VesselDoc[];
  supply: FrameDoc;
}

export function frameColumn(frame: FrameDoc, variable: string): (number | null)[] {
  const j = frame.variables.indexOf(variable);
  if (j < 0) throw new Error(`variable ${variable} not in frame`);
  return frame.values.map((row) => row[j]);
}
