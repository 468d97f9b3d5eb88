/** Shapes of the service's JSON payloads. Money is integer minor units. */

export interface PropertySummary {
  name: string;
  capacity: number;
  rate_minimum_minor: number;
  rate_maximum_minor: number;
  rate_step_minor: number;
  horizon_days: number;
  currency: string;
  dates: string[];
}

export interface PropertiesResponse {
  properties: PropertySummary[];
}

export interface CubicPieceDoc {
  a: number;
  b: number;
  c: number;
  d: number;
  x_lo: number;
  x_hi: number;
}

export interface RateCurveDoc {
  rate: number;
  g: number;
  pieces: CubicPieceDoc[];
  knot_values: number[];
}

export interface CurvesDoc {
  knots: number[];
  transform: boolean;
  rates: RateCurveDoc[];
  diagnostics?: Record<string, unknown>;
}

export interface FitResponse {
  fit_id: string;
  window: { first_day: number; last_day: number };
  excluded_rates: number[];
  curves: CurvesDoc;
}

export interface OptimizeResponse {
  fit_id: string;
  capacity: number;
  expected_revenue: number;
  intervals_per_day: number;
  first_day: number;
  prices: number[];
  policy: number[][];
  value_table: number[][];
  tie_rule: string;
}

export interface WhatifResponse {
  fit_id: string;
  capacity: number;
  expected_revenue: number;
  optimal_expected_revenue: number;
  percent_gap: number;
}

export interface ScenarioDoc {
  checkin_date: string;
  cumulated: boolean;
  rates_minor: number[];
  counts: number[][];
}

export interface FitRequest {
  dates: string[];
  g_low: number;
  g_high: number;
  transform: boolean;
}

/** A parsed response plus the exact bytes it arrived as. */
export interface Enveloped<T> {
  data: T;
  raw: string;
}
