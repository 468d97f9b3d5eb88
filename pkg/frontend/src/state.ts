import {
  Enveloped,
  FitResponse,
  OptimizeResponse,
  PropertySummary,
  WhatifResponse,
} from "./model.js";

/** Dashboard state: a pure projection of service responses plus the knobs
 * the user has set. All numeric truth lives server-side; the client never
 * recomputes fits or revenue.
 */
export interface AppState {
  property: PropertySummary | null;
  selectedDates: string[];
  gLow: number;
  gHigh: number;
  capacity: number;
  overrides: Record<string, number>;
  fit: Enveloped<FitResponse> | null;
  optimize: Enveloped<OptimizeResponse> | null;
  whatif: Enveloped<WhatifResponse> | null;
  error: string | null;
}

export function initialState(): AppState {
  return {
    property: null,
    selectedDates: [],
    gLow: 0.4,
    gHigh: 0.7,
    capacity: 30,
    overrides: {},
    fit: null,
    optimize: null,
    whatif: null,
    error: null,
  };
}

export function withProperty(state: AppState, property: PropertySummary): AppState {
  const dates = property.dates.slice(-16, -1);
  return { ...state, property, selectedDates: dates, capacity: Math.min(
    state.capacity, property.capacity,
  ) };
}

export function withSmoothing(state: AppState, gLow: number, gHigh: number): AppState {
  // Stale results would show curves the knobs no longer describe.
  return { ...state, gLow, gHigh, fit: null, optimize: null, whatif: null };
}

export function withCapacity(state: AppState, capacity: number): AppState {
  return { ...state, capacity, optimize: null, whatif: null };
}

export function withFit(state: AppState, fit: Enveloped<FitResponse>): AppState {
  return { ...state, fit, optimize: null, whatif: null, error: null };
}

export function withOptimize(
  state: AppState, optimize: Enveloped<OptimizeResponse>,
): AppState {
  return { ...state, optimize, error: null };
}

export function withWhatif(state: AppState, whatif: Enveloped<WhatifResponse>): AppState {
  return { ...state, whatif, error: null };
}

export function withOverride(state: AppState, day: number, rate: number | null): AppState {
  const overrides = { ...state.overrides };
  if (rate === null) {
    delete overrides[String(day)];
  } else {
    overrides[String(day)] = rate;
  }
  return { ...state, overrides, whatif: null };
}

export function clearOverrides(state: AppState): AppState {
  return { ...state, overrides: {}, whatif: null };
}

export function withError(state: AppState, error: string): AppState {
  return { ...state, error };
}
