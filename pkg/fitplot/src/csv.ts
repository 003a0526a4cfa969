/** Reader for the sampler's CSV schema: n,mean,ci_halfwidth,samples,mode,seed */

import { readFileSync } from "node:fs";

export interface SampleRow {
  n: number; // kept as a float: n can exceed 2^53 in transcribed tables
  x: number; // log10(n)
  mean: number;
  ciHalfwidth: number;
  samples: number;
  mode: string;
}

export function parseSampleCsv(text: string): SampleRow[] {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length === 0) throw new Error("empty CSV");
  const header = lines[0].split(",");
  const need = ["n", "mean", "ci_halfwidth", "samples", "mode", "seed"];
  for (const col of need) {
    if (!header.includes(col)) {
      throw new Error(`missing column '${col}' in header: ${lines[0]}`);
    }
  }
  const idx = Object.fromEntries(header.map((h, i) => [h, i]));
  const rows: SampleRow[] = [];
  for (const line of lines.slice(1)) {
    if (!line.trim()) continue;
    const parts = line.split(",");
    const n = Number(parts[idx["n"]]);
    const mean = Number(parts[idx["mean"]]);
    if (!Number.isFinite(n) || !Number.isFinite(mean) || n < 2) {
      throw new Error(`bad row: ${line}`);
    }
    rows.push({
      n,
      x: Math.log10(n),
      mean,
      ciHalfwidth: Number(parts[idx["ci_halfwidth"]]) || 0,
      samples: Number(parts[idx["samples"]]) || 0,
      mode: parts[idx["mode"]] ?? "",
    });
  }
  rows.sort((p, q) => p.n - q.n);
  return rows;
}

export function readSampleCsv(path: string): SampleRow[] {
  return parseSampleCsv(readFileSync(path, "utf-8"));
}
