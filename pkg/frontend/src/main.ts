/** DOM wiring for the scenario explorer. */

import { ApiError, fetchCountries, fetchObservations, runFit, runProjection } from "./api.js";
import { renderChart } from "./chart.js";
import type { LineSegment, Point } from "./chart.js";
import {
  COEF_MAX,
  COEF_MIN,
  COEF_STEP,
  ScenarioControls,
  T5_MENU,
  clampCoef,
  defaultControls,
  legendText,
  toProjectRequest,
} from "./controls.js";
import { ProjectionScheduler } from "./scheduler.js";
import type {
  FitResponse,
  ObservationsResponse,
  ProjectRequest,
  ProjectionResponse,
} from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

interface AppState {
  fit: FitResponse | null;
  observations: ObservationsResponse | null;
  controls: ScenarioControls;
  lastProjection: ProjectionResponse | null;
  lastRequest: ProjectRequest | null;
}

const state: AppState = {
  fit: null,
  observations: null,
  controls: defaultControls(),
  lastProjection: null,
  lastRequest: null,
};

const scheduler = new ProjectionScheduler();

function showError(message: string, retry: (() => void) | null): void {
  const banner = $("error-banner");
  banner.hidden = false;
  banner.textContent = message + " ";
  if (retry) {
    const button = document.createElement("button");
    button.textContent = "retry";
    button.addEventListener("click", () => {
      banner.hidden = true;
      retry();
    });
    banner.appendChild(button);
  }
}

function clearError(): void {
  $("error-banner").hidden = true;
}

function dayIndex(dates: string[], day: string): number {
  const idx = dates.indexOf(day);
  return idx >= 0 ? idx : 0;
}

function seriesPoints(values: number[], from: number, to: number): Point[] {
  const points: Point[] = [];
  for (let k = from; k <= to; k += 1) {
    points.push({ x: k, y: values[k] });
  }
  return points;
}

function renderProjection(proj: ProjectionResponse): void {
  state.lastProjection = proj;
  const t4 = dayIndex(proj.dates, proj.t4);
  const t5 = dayIndex(proj.dates, proj.t5);
  const last = proj.dates.length - 1;

  const dots: Point[] = [];
  if (state.observations) {
    state.observations.idata.forEach((v, k) => dots.push({ x: k, y: v }));
  }
  // fitted and projected segments share the T4 point, so they join exactly
  const mainSegments: LineSegment[] = [
    { points: seriesPoints(proj.i, 0, t4), className: "fitted" },
    { points: seriesPoints(proj.i, t4, last), className: "projected" },
  ];
  const markers = [
    { x: t4, label: "T4" },
    { x: t5, label: "T5" },
  ];
  const xTicks = [0, t4, last].map((k) => ({ x: k, label: proj.dates[k].slice(5) }));
  $("chart-infected").innerHTML = renderChart({
    width: 720,
    height: 300,
    segments: mainSegments,
    dots,
    markers,
    xTicks,
    yLabel: "daily infected I(t)",
  });
  $("chart-rates").innerHTML = renderChart({
    width: 720,
    height: 170,
    segments: [
      { points: seriesPoints(proj.beta, 0, last), className: "beta" },
      { points: seriesPoints(proj.gamma, 0, last), className: "gamma" },
    ],
    markers,
    xTicks,
    yLabel: "beta (red), gamma (green)",
  });
  $("chart-r0").innerHTML = renderChart({
    width: 720,
    height: 170,
    segments: [{ points: seriesPoints(proj.r0, 0, last), className: "r0" }],
    markers,
    xTicks,
    yLabel: "R0(t)",
  });
  $("legend").textContent = legendText(state.controls);
  $("summary").textContent =
    `peak ${proj.peak_date} (${proj.peak_value.toFixed(1)}/day), ` +
    `I(${proj.horizon}) = ${proj.value_at_horizon.toFixed(1)}/day`;
}

function requestProjection(): void {
  const fit = state.fit;
  if (!fit) return;
  const body = toProjectRequest(fit.model_id, state.controls);
  state.lastRequest = body;
  scheduler.request((seq) => {
    runProjection(body)
      .then((proj) => {
        if (scheduler.shouldApply(seq)) {
          clearError();
          renderProjection(proj);
        }
      })
      .catch((err) => {
        if (seq === scheduler.lastIssued) {
          showError(describe(err), requestProjection); // keep last good chart
        }
      });
  });
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.code}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}

function renderModelList(): void {
  const fit = state.fit;
  const list = $("model-list");
  list.innerHTML = "";
  if (!fit) return;
  for (const model of fit.document.models.models) {
    const label = document.createElement("label");
    const radio = document.createElement("input");
    radio.type = "radio";
    radio.name = "model-rank";
    radio.value = String(model.rank);
    radio.checked = model.rank === state.controls.rank;
    radio.addEventListener("change", () => {
      state.controls.rank = model.rank;
      requestProjection();
    });
    label.appendChild(radio);
    label.appendChild(
      document.createTextNode(
        ` Model ${model.rank}: Fval=${model.fval.toFixed(1)}, ` +
          `nodes ${model.theta.t2} / ${model.theta.t3}, peak ${model.peak_date}`,
      ),
    );
    const item = document.createElement("div");
    item.appendChild(label);
    list.appendChild(item);
  }
}

async function onFitSubmit(event: Event): Promise<void> {
  event.preventDefault();
  const country = ($("country") as HTMLSelectElement).value;
  const start = ($("start") as HTMLInputElement).value;
  const end = ($("end") as HTMLInputElement).value;
  const scale = Number(($("scale") as HTMLInputElement).value) || 1;
  if (!country || !start || !end || start >= end) {
    showError("pick a country and a start date before the end date", null);
    return;
  }
  const button = $("fit-button") as HTMLButtonElement;
  button.disabled = true;
  button.textContent = "fitting…";
  try {
    const fit = await runFit({ country, start, end, scale, top: 3, seed: 0 });
    state.fit = fit;
    state.controls = defaultControls();
    syncControlInputs();
    state.observations = await fetchObservations(country, start, end, scale);
    clearError();
    renderModelList();
    requestProjection(); // baseline: all coefficients at 1
  } catch (err) {
    showError(describe(err), null);
  } finally {
    button.disabled = false;
    button.textContent = "Fit";
  }
}

const COEF_IDS = ["coef1", "coef2", "coef11", "coef22"] as const;

function syncControlInputs(): void {
  for (const id of COEF_IDS) {
    ($(id) as HTMLInputElement).value = String(state.controls[id]);
    $(`${id}-value`).textContent = state.controls[id].toFixed(2);
  }
  ($("t5-select") as HTMLSelectElement).value = T5_MENU.includes(
    state.controls.t5OffsetDays as (typeof T5_MENU)[number],
  )
    ? String(state.controls.t5OffsetDays)
    : "custom";
  ($("t5-custom") as HTMLInputElement).value = String(state.controls.t5OffsetDays);
  ($("horizon") as HTMLInputElement).value = String(state.controls.horizonDays);
  $("legend").textContent = legendText(state.controls);
}

function wireControls(): void {
  for (const id of COEF_IDS) {
    const input = $(id) as HTMLInputElement;
    input.min = String(COEF_MIN);
    input.max = String(COEF_MAX);
    input.step = String(COEF_STEP);
    input.addEventListener("input", () => {
      state.controls[id] = clampCoef(Number(input.value));
      $(`${id}-value`).textContent = state.controls[id].toFixed(2);
      $("legend").textContent = legendText(state.controls);
      requestProjection();
    });
  }
  const t5Select = $("t5-select") as HTMLSelectElement;
  const t5Custom = $("t5-custom") as HTMLInputElement;
  t5Select.addEventListener("change", () => {
    if (t5Select.value !== "custom") {
      state.controls.t5OffsetDays = Number(t5Select.value);
      t5Custom.value = t5Select.value;
      requestProjection();
    }
  });
  t5Custom.addEventListener("change", () => {
    const v = Math.max(1, Math.round(Number(t5Custom.value) || 15));
    state.controls.t5OffsetDays = v;
    t5Select.value = T5_MENU.includes(v as (typeof T5_MENU)[number])
      ? String(v)
      : "custom";
    requestProjection();
  });
  const horizon = $("horizon") as HTMLInputElement;
  horizon.addEventListener("change", () => {
    state.controls.horizonDays = Math.max(2, Math.round(Number(horizon.value) || 60));
    requestProjection();
  });
}

async function init(): Promise<void> {
  $("fit-form").addEventListener("submit", (e) => {
    void onFitSubmit(e);
  });
  wireControls();
  syncControlInputs();
  try {
    const { countries } = await fetchCountries();
    const select = $("country") as HTMLSelectElement;
    for (const name of countries) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      select.appendChild(option);
    }
  } catch (err) {
    showError(describe(err), () => void init());
  }
}

void init();
