/** Scenario control state and its exact mapping to the project payload. */

import type { ProjectRequest, ScenarioPayload } from "./types.js";

export const COEF_MIN = 0.25;
export const COEF_MAX = 3.0;
export const COEF_STEP = 0.05;
export const T5_MENU = [5, 15, 25] as const;

export interface ScenarioControls {
  rank: number;
  t5OffsetDays: number;
  horizonDays: number;
  coef1: number;
  coef2: number;
  coef11: number;
  coef22: number;
}

export function defaultControls(): ScenarioControls {
  return {
    rank: 1,
    t5OffsetDays: 15,
    horizonDays: 60,
    coef1: 1.0,
    coef2: 1.0,
    coef11: 1.0,
    coef22: 1.0,
  };
}

/** Clamp into [COEF_MIN, COEF_MAX] and snap onto the 0.05 slider grid. */
export function clampCoef(value: number): number {
  if (!Number.isFinite(value)) return 1.0;
  const clamped = Math.min(COEF_MAX, Math.max(COEF_MIN, value));
  const steps = Math.round((clamped - COEF_MIN) / COEF_STEP);
  return Number((COEF_MIN + steps * COEF_STEP).toFixed(2));
}

/** Positive integer day counts; out-of-range values clamp, not error. */
export function clampDays(value: number, fallback: number, max = 365): number {
  if (!Number.isFinite(value)) return fallback;
  return Math.min(max, Math.max(1, Math.round(value)));
}

/** Control state -> request body; always a valid payload. */
export function toProjectRequest(
  modelId: string,
  controls: ScenarioControls,
): ProjectRequest {
  const t5 = clampDays(controls.t5OffsetDays, 15);
  const horizon = Math.max(clampDays(controls.horizonDays, 60), t5 + 1);
  const scenario: ScenarioPayload = {
    t5_offset_days: t5,
    horizon_days: horizon,
    coef1: clampCoef(controls.coef1),
    coef2: clampCoef(controls.coef2),
    coef11: clampCoef(controls.coef11),
    coef22: clampCoef(controls.coef22),
  };
  return { model_id: modelId, rank: Math.max(1, Math.round(controls.rank)), scenario };
}

/** Inverse of toProjectRequest for in-range payloads. */
export function controlsFromRequest(request: ProjectRequest): ScenarioControls {
  return {
    rank: request.rank,
    t5OffsetDays: request.scenario.t5_offset_days,
    horizonDays: request.scenario.horizon_days,
    coef1: request.scenario.coef1,
    coef2: request.scenario.coef2,
    coef11: request.scenario.coef11,
    coef22: request.scenario.coef22,
  };
}

export function legendText(controls: ScenarioControls): string {
  return (
    `Coef1=${controls.coef1.toFixed(2)}, Coef2=${controls.coef2.toFixed(2)}, ` +
    `Coef11=${controls.coef11.toFixed(2)}, Coef22=${controls.coef22.toFixed(2)}, ` +
    `T5=T4+${controls.t5OffsetDays}d`
  );
}
