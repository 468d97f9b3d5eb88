import {
  Enveloped,
  FitRequest,
  FitResponse,
  OptimizeResponse,
  PropertiesResponse,
  ScenarioDoc,
  WhatifResponse,
} from "./model.js";

/** Thin typed client; every response keeps its raw bytes for display. */
export class DashboardApi {
  constructor(private readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<Enveloped<T>> {
    const response = await fetch(this.baseUrl + path, init);
    const raw = await response.text();
    if (!response.ok) {
      throw new Error(`${path} -> ${response.status}: ${raw}`);
    }
    return { data: JSON.parse(raw) as T, raw };
  }

  private post<T>(path: string, body: unknown): Promise<Enveloped<T>> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  properties(): Promise<Enveloped<PropertiesResponse>> {
    return this.request<PropertiesResponse>("/properties");
  }

  scenario(date: string): Promise<Enveloped<ScenarioDoc>> {
    return this.request<ScenarioDoc>(`/scenarios/${date}`);
  }

  fit(body: FitRequest): Promise<Enveloped<FitResponse>> {
    return this.post<FitResponse>("/fit", body);
  }

  optimize(fitId: string, capacity: number): Promise<Enveloped<OptimizeResponse>> {
    return this.post<OptimizeResponse>("/optimize", {
      fit_id: fitId,
      capacity,
    });
  }

  whatif(
    fitId: string,
    capacity: number,
    overrides: Record<string, number>,
  ): Promise<Enveloped<WhatifResponse>> {
    return this.post<WhatifResponse>("/whatif", {
      fit_id: fitId,
      capacity,
      overrides,
    });
  }
}
