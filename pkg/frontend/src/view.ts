import { rawNumber, rawNumbers } from "./format.js";
import { AppState } from "./state.js";
import { Enveloped, FitResponse, OptimizeResponse, WhatifResponse } from "./model.js";

/** Pure render functions building HTML/SVG strings from state.
 *
 * Every displayed number that originated in a service response is cut from
 * the raw response bytes; the client computes pixel coordinates and nothing
 * else.
 */

const WIDTH = 640;
const HEIGHT = 260;
const PAD = 28;
const SERIES_COLORS = ["#2563eb", "#059669", "#dc2626", "#7c3aed", "#ea580c"];

function escapeHtml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function curvePoints(
  knots: number[], values: number[], maxValue: number,
): string {
  const xMin = knots[0];
  const xMax = knots[knots.length - 1];
  const top = maxValue > 0 ? maxValue : 1;
  return knots
    .map((x, i) => {
      const px = PAD + ((x - xMin) / (xMax - xMin)) * (WIDTH - 2 * PAD);
      const py = HEIGHT - PAD - (Math.max(values[i], 0) / top) * (HEIGHT - 2 * PAD);
      return `${px.toFixed(1)},${py.toFixed(1)}`;
    })
    .join(" ");
}

export function curvesView(fit: Enveloped<FitResponse>): string {
  const curves = fit.data.curves;
  const gTokens = rawNumbers(fit.raw, "g");
  const rateTokens = rawNumbers(fit.raw, "rate");
  const maxValue = Math.max(
    ...curves.rates.flatMap((r) => r.knot_values), 0,
  );
  const polylines = curves.rates
    .map((curve, i) => {
      const points = curvePoints(curves.knots, curve.knot_values, maxValue);
      const color = SERIES_COLORS[i % SERIES_COLORS.length];
      return `<polyline fill="none" stroke="${color}" stroke-width="2" ` +
        `data-rate="${curve.rate}" points="${points}"/>`;
    })
    .join("\n    ");
  const legend = curves.rates
    .map((curve, i) => {
      const color = SERIES_COLORS[i % SERIES_COLORS.length];
      return `<span class="legend-item" style="color:${color}">` +
        `rate <b data-field="rate">${rateTokens[i]}</b> ` +
        `g=<b data-field="g">${gTokens[i]}</b></span>`;
    })
    .join(" ");
  const excluded = fit.data.excluded_rates.length
    ? `<p class="muted">excluded (too little data): ${fit.data.excluded_rates.join(", ")}</p>`
    : "";
  return `<section id="curves">
    <h2>Fitted demand curves (days ${fit.data.window.first_day}&ndash;${fit.data.window.last_day})</h2>
    <svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img">
    <rect x="${PAD}" y="${PAD}" width="${WIDTH - 2 * PAD}" height="${HEIGHT - 2 * PAD}"
      fill="none" stroke="#d4d4d8"/>
    ${polylines}
    </svg>
    <p>${legend}</p>
    ${excluded}
  </section>`;
}

export function revenueView(optimize: Enveloped<OptimizeResponse>): string {
  const revenue = rawNumber(optimize.raw, "expected_revenue");
  const capacity = rawNumber(optimize.raw, "capacity");
  return `<section id="revenue">
    <h2>Optimal policy</h2>
    <p>expected revenue <b data-field="expected_revenue">${revenue}</b>
       with capacity <b data-field="capacity">${capacity}</b>
       (ties &rarr; ${escapeHtml(optimize.data.tie_rule)})</p>
    ${policyTable(optimize.data)}
  </section>`;
}

export function policyTable(optimize: OptimizeResponse): string {
  const perDay = optimize.intervals_per_day;
  const days = optimize.policy.length / perDay;
  const capacities = [1, Math.ceil(optimize.capacity / 2), optimize.capacity]
    .filter((x, i, arr) => x >= 1 && arr.indexOf(x) === i);
  const header = capacities.map((x) => `<th>x=${x}</th>`).join("");
  const rows: string[] = [];
  for (let d = 0; d < days; d += 1) {
    const interval = d * perDay;
    const cells = capacities
      .map((x) => {
        const j = optimize.policy[interval][x];
        return `<td>${j >= 0 ? optimize.prices[j] : "&mdash;"}</td>`;
      })
      .join("");
    rows.push(`<tr><td>day ${optimize.first_day + d}</td>${cells}</tr>`);
  }
  return `<table class="policy"><thead><tr><th>day</th>${header}</tr></thead>
    <tbody>${rows.join("")}</tbody></table>`;
}

export function whatifView(whatif: Enveloped<WhatifResponse> | null): string {
  if (!whatif) {
    return `<section id="whatif"><h2>What-if</h2>
      <p class="muted">no evaluation yet</p></section>`;
  }
  const expected = rawNumber(whatif.raw, "expected_revenue");
  const optimal = rawNumber(whatif.raw, "optimal_expected_revenue");
  const gap = rawNumber(whatif.raw, "percent_gap");
  return `<section id="whatif">
    <h2>What-if</h2>
    <p>overridden schedule <b data-field="expected_revenue">${expected}</b>
       vs optimal <b data-field="optimal_expected_revenue">${optimal}</b>
       &rarr; gap <b data-field="percent_gap">${gap}</b>%</p>
  </section>`;
}

export function overridesView(state: AppState): string {
  const entries = Object.entries(state.overrides).sort(
    (a, b) => Number(a[0]) - Number(b[0]),
  );
  if (!entries.length) {
    return `<p class="muted">no overrides; evaluation follows the optimal policy</p>`;
  }
  const items = entries
    .map(([day, rate]) => `<li>day ${day} &rarr; rate ${rate}</li>`)
    .join("");
  return `<ul id="override-list">${items}</ul>`;
}

export function errorView(state: AppState): string {
  if (!state.error) {
    return "";
  }
  return `<p class="error">${escapeHtml(state.error)}</p>`;
}

export function render(state: AppState): string {
  const parts: string[] = [errorView(state)];
  if (state.fit) {
    parts.push(curvesView(state.fit));
  } else {
    parts.push(`<section id="curves"><p class="muted">no fit loaded</p></section>`);
  }
  if (state.optimize) {
    parts.push(revenueView(state.optimize));
  }
  parts.push(whatifView(state.whatif));
  parts.push(`<section id="overrides"><h2>Rate overrides</h2>${overridesView(state)}</section>`);
  return parts.join("\n");
}
