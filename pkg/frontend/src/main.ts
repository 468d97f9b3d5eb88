import { DashboardApi } from "./api.js";
import {
  AppState,
  clearOverrides,
  initialState,
  withCapacity,
  withError,
  withFit,
  withOptimize,
  withOverride,
  withProperty,
  withSmoothing,
  withWhatif,
} from "./state.js";
import { render } from "./view.js";

const baseUrl =
  new URLSearchParams(window.location.search).get("service") ??
  "http://127.0.0.1:8000";
const api = new DashboardApi(baseUrl);

let state: AppState = initialState();

function setState(next: AppState): void {
  state = next;
  const mount = document.getElementById("app");
  if (mount) {
    mount.innerHTML = render(state);
  }
  syncControls();
}

function syncControls(): void {
  const gLow = document.getElementById("g-low") as HTMLInputElement | null;
  const gHigh = document.getElementById("g-high") as HTMLInputElement | null;
  const capacity = document.getElementById("capacity") as HTMLInputElement | null;
  if (gLow) gLow.value = String(state.gLow);
  if (gHigh) gHigh.value = String(state.gHigh);
  if (capacity) capacity.value = String(state.capacity);
}

async function guard(action: () => Promise<void>): Promise<void> {
  try {
    await action();
  } catch (error) {
    setState(withError(state, error instanceof Error ? error.message : String(error)));
  }
}

async function refit(): Promise<void> {
  await guard(async () => {
    const fit = await api.fit({
      dates: state.selectedDates,
      g_low: state.gLow,
      g_high: state.gHigh,
      transform: false,
    });
    setState(withFit(state, fit));
  });
}

async function optimize(): Promise<void> {
  if (!state.fit) return;
  const fitId = state.fit.data.fit_id;
  await guard(async () => {
    const result = await api.optimize(fitId, state.capacity);
    setState(withOptimize(state, result));
  });
}

async function evaluateWhatif(): Promise<void> {
  if (!state.fit) return;
  const fitId = state.fit.data.fit_id;
  await guard(async () => {
    const result = await api.whatif(fitId, state.capacity, state.overrides);
    setState(withWhatif(state, result));
  });
}

function wireControls(): void {
  document.getElementById("refit")?.addEventListener("click", () => void refit());
  document.getElementById("optimize")?.addEventListener("click", () => void optimize());
  document.getElementById("evaluate")?.addEventListener("click", () => void evaluateWhatif());
  document.getElementById("clear-overrides")?.addEventListener("click", () => {
    setState(clearOverrides(state));
    void evaluateWhatif();
  });
  document.getElementById("g-low")?.addEventListener("change", (event) => {
    const value = Number((event.target as HTMLInputElement).value);
    setState(withSmoothing(state, value, Math.max(value, state.gHigh)));
  });
  document.getElementById("g-high")?.addEventListener("change", (event) => {
    const value = Number((event.target as HTMLInputElement).value);
    setState(withSmoothing(state, Math.min(state.gLow, value), value));
  });
  document.getElementById("capacity")?.addEventListener("change", (event) => {
    setState(withCapacity(state, Number((event.target as HTMLInputElement).value)));
  });
  document.getElementById("add-override")?.addEventListener("click", () => {
    const day = Number((document.getElementById("override-day") as HTMLInputElement).value);
    const rate = Number((document.getElementById("override-rate") as HTMLInputElement).value);
    if (Number.isFinite(day) && Number.isFinite(rate)) {
      setState(withOverride(state, day, rate));
      void evaluateWhatif();
    }
  });
}

async function bootstrap(): Promise<void> {
  wireControls();
  await guard(async () => {
    const properties = await api.properties();
    setState(withProperty(state, properties.data.properties[0]));
    await refit();
    await optimize();
    await evaluateWhatif();
  });
}

void bootstrap();
