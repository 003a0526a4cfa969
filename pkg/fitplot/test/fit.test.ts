import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { fitModel, modelValue, FitError } from "../src/model.js";
import { parseSampleCsv } from "../src/csv.js";
import { renderSvg } from "../src/svg.js";

const here = dirname(fileURLToPath(import.meta.url));
const table2 = parseSampleCsv(
  readFileSync(join(here, "..", "fixtures", "table2.csv"), "utf-8"),
);

const GEN = { a: 28.3772, b: 11.5122, c: 184.398, d: 3.28974 };

function sigFigsMatch(got: number, want: number, figs: number): boolean {
  if (want === 0) return Math.abs(got) < 10 ** -figs;
  const scale = 10 ** (Math.ceil(Math.log10(Math.abs(want))) - figs);
  return Math.abs(got - want) < 0.5 * scale;
}

describe("model fitting", () => {
  it("recovers generator parameters from synthetic data to 4 significant figures", () => {
    const xs = Array.from({ length: 22 }, (_, i) => 4 + i);
    const ys = xs.map((x) => modelValue([GEN.a, GEN.b, GEN.c, GEN.d], x));
    const fit = fitModel(xs, ys, 0);
    expect(sigFigsMatch(fit.a, GEN.a, 4)).toBe(true);
    expect(sigFigsMatch(fit.b, GEN.b, 4)).toBe(true);
    expect(sigFigsMatch(fit.c, GEN.c, 4)).toBe(true);
    expect(sigFigsMatch(fit.d, GEN.d, 4)).toBe(true);
    expect(fit.rss).toBeLessThan(1e-12);
  });

  it("fits the transcribed sampling table with d near the reported asymptote", () => {
    const fit = fitModel(
      table2.map((r) => r.x),
      table2.map((r) => r.mean),
      3,
    );
    expect(Math.abs(fit.d - 3.28974)).toBeLessThan(0.05);
  });

  it("reproduces the reported parameters when the first four rows are dropped", () => {
    const fit = fitModel(
      table2.map((r) => r.x),
      table2.map((r) => r.mean),
      4,
    );
    expect(sigFigsMatch(fit.a, GEN.a, 4)).toBe(true);
    expect(sigFigsMatch(fit.b, GEN.b, 4)).toBe(true);
    expect(sigFigsMatch(fit.c, GEN.c, 4)).toBe(true);
    expect(sigFigsMatch(fit.d, GEN.d, 5)).toBe(true);
  });

  it("handles constant data as a degenerate fit", () => {
    const xs = Array.from({ length: 10 }, (_, i) => 3 + i);
    const ys = xs.map(() => 3.3);
    const fit = fitModel(xs, ys, 0);
    expect(Math.abs(fit.d - 3.3)).toBeLessThan(1e-3);
    expect(Math.abs(fit.a)).toBeLessThan(0.5);
    expect(fit.rss).toBeLessThan(1e-10);
  });

  it("keeps the residual sum non-increasing across accepted iterations", () => {
    const fit = fitModel(
      table2.map((r) => r.x),
      table2.map((r) => r.mean),
      3,
    );
    for (let i = 1; i < fit.trace.length; i++) {
      expect(fit.trace[i]).toBeLessThanOrEqual(fit.trace[i - 1]);
    }
  });

  it("refitting its own curve reproduces parameters to 6 digits", () => {
    const first = fitModel(
      table2.map((r) => r.x),
      table2.map((r) => r.mean),
      4,
    );
    const xs = table2.map((r) => r.x).slice(4);
    const ys = xs.map((x) => modelValue([first.a, first.b, first.c, first.d], x));
    const second = fitModel(xs, ys, 0);
    expect(sigFigsMatch(second.a, first.a, 6)).toBe(true);
    expect(sigFigsMatch(second.b, first.b, 6)).toBe(true);
    expect(sigFigsMatch(second.c, first.c, 6)).toBe(true);
    expect(sigFigsMatch(second.d, first.d, 6)).toBe(true);
  });

  it("is deterministic for fixed input and initialization", () => {
    const run = () =>
      fitModel(
        table2.map((r) => r.x),
        table2.map((r) => r.mean),
        3,
      );
    const a = run();
    const b = run();
    expect(a.a).toBe(b.a);
    expect(a.trace).toEqual(b.trace);
  });

  it("rejects datasets with fewer than 6 retained rows", () => {
    expect(() => fitModel([1, 2, 3, 4, 5, 6, 7], [1, 1, 1, 1, 1, 1, 1], 3)).toThrow();
  });

  it("reports a residual trace on pathological non-convergence", () => {
    // a dataset the positive-denominator check must reject
    const xs = [-20, -10, -5, 5, 10, 20];
    const ys = [1, -1, 1, -1, 1, -1];
    try {
      const fit = fitModel(xs, ys, 0, { maxIterations: 3, tolerance: 0 });
      expect(fit.trace.length).toBeGreaterThan(0); // converged fast instead: fine
    } catch (e) {
      expect(e instanceof FitError).toBe(true);
      if (e instanceof FitError) expect(e.trace.length).toBeGreaterThan(0);
    }
  });
});

describe("csv parsing", () => {
  it("reads the sampler schema and sorts by n", () => {
    expect(table2.length).toBe(25);
    expect(table2[0].n).toBe(10);
    expect(table2[0].x).toBeCloseTo(1, 12);
    expect(table2[24].x).toBeCloseTo(25, 9);
    expect(table2[3].mean).toBeCloseTo(3.400376, 12);
  });

  it("rejects missing columns", () => {
    expect(() => parseSampleCsv("a,b\n1,2\n")).toThrow(/missing column/);
  });

  it("rejects malformed rows", () => {
    expect(() =>
      parseSampleCsv("n,mean,ci_halfwidth,samples,mode,seed\nx,3.3,0,1,exact,0\n"),
    ).toThrow(/bad row/);
  });
});

describe("svg rendering", () => {
  it("renders a plot with points, curve and parameter label", () => {
    const fit = fitModel(
      table2.map((r) => r.x),
      table2.map((r) => r.mean),
      3,
    );
    const svg = renderSvg(table2, fit);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("polyline");
    expect((svg.match(/<circle/g) ?? []).length).toBe(25);
    expect(svg).toContain(`d=${fit.d.toFixed(5)}`);
  });
});
