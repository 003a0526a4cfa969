/** Minimal SVG scatter + fitted-curve rendering; no DOM dependency. */

import { FitResult, modelValue } from "./model.js";
import { SampleRow } from "./csv.js";

const W = 760;
const H = 480;
const M = { left: 64, right: 24, top: 28, bottom: 48 };

function scaler(lo: number, hi: number, outLo: number, outHi: number) {
  const span = hi - lo || 1;
  return (v: number) => outLo + ((v - lo) / span) * (outHi - outLo);
}

export function renderSvg(rows: SampleRow[], fit: FitResult): string {
  const xs = rows.map((r) => r.x);
  const ys = rows.map((r) => r.mean);
  const xLo = Math.min(...xs) - 0.5;
  const xHi = Math.max(...xs) + 0.5;
  const yLo = Math.min(...ys, fit.d) - 0.01;
  const yHi = Math.max(...ys) + 0.01;
  const sx = scaler(xLo, xHi, M.left, W - M.right);
  const sy = scaler(yLo, yHi, H - M.bottom, M.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">`,
    `<rect width="${W}" height="${H}" fill="white"/>`,
  );
  // axes
  parts.push(
    `<line x1="${M.left}" y1="${H - M.bottom}" x2="${W - M.right}" y2="${H - M.bottom}" stroke="black"/>`,
    `<line x1="${M.left}" y1="${M.top}" x2="${M.left}" y2="${H - M.bottom}" stroke="black"/>`,
  );
  for (let x = Math.ceil(xLo); x <= Math.floor(xHi); x += 2) {
    parts.push(
      `<text x="${sx(x)}" y="${H - M.bottom + 18}" font-size="11" text-anchor="middle">${x}</text>`,
      `<line x1="${sx(x)}" y1="${H - M.bottom}" x2="${sx(x)}" y2="${H - M.bottom + 4}" stroke="black"/>`,
    );
  }
  for (const y of [yLo + 0.01, (yLo + yHi) / 2, yHi - 0.01]) {
    parts.push(
      `<text x="${M.left - 6}" y="${sy(y) + 4}" font-size="11" text-anchor="end">${y.toFixed(3)}</text>`,
    );
  }
  parts.push(
    `<text x="${(M.left + W - M.right) / 2}" y="${H - 10}" font-size="12" text-anchor="middle">log10 n</text>`,
  );
  // fitted curve
  const steps = 240;
  const pts: string[] = [];
  for (let i = 0; i <= steps; i++) {
    const x = xLo + ((xHi - xLo) * i) / steps;
    const y = modelValue([fit.a, fit.b, fit.c, fit.d], x);
    pts.push(`${sx(x).toFixed(2)},${sy(y).toFixed(2)}`);
  }
  parts.push(
    `<polyline points="${pts.join(" ")}" fill="none" stroke="#c0392b" stroke-width="1.5"/>`,
  );
  // data points (dropped ones hollow)
  rows.forEach((r, i) => {
    const fill = i < fit.dropCount ? "white" : "#2c3e50";
    parts.push(
      `<circle cx="${sx(r.x)}" cy="${sy(r.mean)}" r="3.2" fill="${fill}" stroke="#2c3e50"/>`,
    );
  });
  const label =
    `a=${fit.a.toFixed(4)} b=${fit.b.toFixed(4)} ` +
    `c=${fit.c.toFixed(3)} d=${fit.d.toFixed(5)}`;
  parts.push(
    `<text x="${W - M.right - 6}" y="${M.top + 6}" font-size="12" text-anchor="end">${label}</text>`,
    `<line x1="${M.left}" y1="${sy(fit.d)}" x2="${W - M.right}" y2="${sy(fit.d)}" stroke="#c0392b" stroke-dasharray="5 4" stroke-width="0.8"/>`,
    "</svg>",
  );
  return parts.join("\n");
}
