/** Payload types mirroring the HTTP API. */

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: unknown;
}

export interface FitRequest {
  country: string;
  start: string;
  end: string;
  population?: number;
  scale?: number;
  top?: number;
  seed?: number;
}

export interface ThetaPayload {
  t2: string;
  t3: string;
  beta_t2: number;
  beta_t3: number;
  beta_t4: number;
  gamma_t2: number;
  gamma_t3: number;
  gamma_t4: number;
  lambda: number;
}

export interface FittedModelPayload {
  theta: ThetaPayload;
  fval: number;
  rank: number;
  rmse_infected: number;
  rmse_removed: number;
  peak_date: string;
  peak_value: number;
  t1: string;
  t4: string;
  i0: number;
}

export interface ModelDocument {
  schema_version: string;
  country: string;
  t1: string;
  t4: string;
  population_n: number;
  models: {
    models: FittedModelPayload[];
    fmax: number;
    evaluated_count: number;
  };
  created_at: string | null;
}

export interface FitResponse {
  model_id: string;
  document: ModelDocument;
}

export interface ScenarioPayload {
  t5_offset_days: number;
  horizon_days: number;
  coef1: number;
  coef2: number;
  coef11: number;
  coef22: number;
}

export interface ProjectRequest {
  model_id: string;
  rank: number;
  scenario: ScenarioPayload;
}

export interface ProjectionResponse {
  dates: string[];
  beta: number[];
  gamma: number[];
  s: number[];
  e: number[];
  i: number[];
  r: number[];
  r0: number[];
  t4: string;
  t5: string;
  horizon: string;
  peak_date: string;
  peak_value: number;
  value_at_horizon: number;
  scenario: ScenarioPayload;
}

export interface ObservationsResponse {
  country: string;
  t1: string;
  t4: string;
  idata: number[];
  rcum: number[];
  population_n: number;
  scale: number;
}
