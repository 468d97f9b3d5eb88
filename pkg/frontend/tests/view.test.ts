import { describe, expect, it } from "vitest";

import { rawNumber, rawNumbers } from "../src/format.js";
import {
  FitResponse,
  OptimizeResponse,
  PropertiesResponse,
  WhatifResponse,
} from "../src/model.js";
import {
  initialState,
  withFit,
  withOptimize,
  withProperty,
  withWhatif,
} from "../src/state.js";
import { curvesView, render, revenueView, whatifView } from "../src/view.js";
import { fixture } from "./fixtures.js";

const property = fixture<PropertiesResponse>("properties").data.properties[0];

function polylinePoints(html: string): string[] {
  return [...html.matchAll(/points="([^"]+)"/g)].map((m) => m[1]);
}

describe("curve rendering", () => {
  it("draws one polyline per fitted rate class", () => {
    const fit = fixture<FitResponse>("fit");
    const html = curvesView(fit);
    expect(polylinePoints(html).length).toBe(fit.data.curves.rates.length);
    for (const curve of fit.data.curves.rates) {
      expect(html).toContain(`data-rate="${curve.rate}"`);
    }
  });

  it("adjusting g and refitting renders different curves", () => {
    const before = curvesView(fixture<FitResponse>("fit"));
    const after = curvesView(fixture<FitResponse>("fit_refit"));
    expect(polylinePoints(before).length).toBe(polylinePoints(after).length);
    expect(polylinePoints(before)).not.toEqual(polylinePoints(after));
    // The smoothing badges track the refit response bytes.
    expect(rawNumbers(fixture<FitResponse>("fit_refit").raw, "g")).toContain("0.1");
    expect(after).toContain(`data-field="g">0.1</b>`);
  });

  it("smoothing badges are byte-equal to the response", () => {
    const fit = fixture<FitResponse>("fit");
    const html = curvesView(fit);
    for (const token of rawNumbers(fit.raw, "g")) {
      expect(html).toContain(`data-field="g">${token}</b>`);
    }
  });
});

describe("what-if display", () => {
  it("override equal to the optimal policy shows a 0.0 gap, byte-equal", () => {
    const whatif = fixture<WhatifResponse>("whatif_optimal");
    expect(whatif.data.expected_revenue).toBe(whatif.data.optimal_expected_revenue);
    const html = whatifView(whatif);
    const gapToken = rawNumber(whatif.raw, "percent_gap");
    expect(gapToken).toBe("0.0");
    expect(html).toContain(`data-field="percent_gap">${gapToken}</b>`);
    const revenueToken = rawNumber(whatif.raw, "expected_revenue");
    expect(html).toContain(`data-field="expected_revenue">${revenueToken}</b>`);
  });

  it("a worse override shows its negative gap from the service, unaltered", () => {
    const whatif = fixture<WhatifResponse>("whatif_override");
    const gapToken = rawNumber(whatif.raw, "percent_gap");
    expect(Number(gapToken)).toBeLessThan(0);
    expect(whatifView(whatif)).toContain(`data-field="percent_gap">${gapToken}</b>`);
  });
});

describe("revenue panel", () => {
  it("displays the service's expected revenue bytes", () => {
    const optimize = fixture<OptimizeResponse>("optimize");
    const html = revenueView(optimize);
    const token = rawNumber(optimize.raw, "expected_revenue");
    expect(html).toContain(`data-field="expected_revenue">${token}</b>`);
    expect(html).toContain("<table");
  });
});

describe("full page render", () => {
  it("every displayed numeric field is byte-equal to its response", () => {
    let state = withProperty(initialState(), property);
    state = withFit(state, fixture<FitResponse>("fit"));
    state = withOptimize(state, fixture<OptimizeResponse>("optimize"));
    state = withWhatif(state, fixture<WhatifResponse>("whatif_optimal"));
    const html = render(state);

    const displayed = [...html.matchAll(/data-field="([^"]+)">([^<]+)</g)];
    expect(displayed.length).toBeGreaterThan(6);
    const sources: Record<string, string> = {
      g: state.fit!.raw,
      rate: state.fit!.raw,
      expected_revenue: "",  // checked per-section below
      capacity: state.optimize!.raw,
      optimal_expected_revenue: state.whatif!.raw,
      percent_gap: state.whatif!.raw,
    };
    for (const [, field, shown] of displayed) {
      if (field === "expected_revenue") {
        const inOptimize = state.optimize!.raw.includes(`"expected_revenue":${shown}`);
        const inWhatif = state.whatif!.raw.includes(`"expected_revenue":${shown}`);
        expect(inOptimize || inWhatif).toBe(true);
        continue;
      }
      const raw = sources[field];
      expect(raw, `unexpected field ${field}`).toBeDefined();
      expect(raw).toContain(`"${field}":${shown}`);
    }
  });

  it("renders placeholders before anything is loaded", () => {
    const html = render(initialState());
    expect(html).toContain("no fit loaded");
    expect(html).toContain("no evaluation yet");
  });
});
