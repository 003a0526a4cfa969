/**
 * fitplot CLI: read a sampler CSV, fit the decay model, print one CSV line
 * of parameters to stdout and optionally write an SVG plot.
 *
 *   node dist/cli.js --csv means.csv [--drop 3] [--out-image fit.svg]
 */

import { writeFileSync } from "node:fs";
import { readSampleCsv } from "./csv.js";
import { FitError, fitModel, resultCsvLine } from "./model.js";
import { renderSvg } from "./svg.js";

interface Args {
  csv: string;
  drop: number;
  outImage?: string;
}

function parseArgs(argv: string[]): Args {
  let csv: string | undefined;
  let drop = 3;
  let outImage: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case "--csv":
        csv = argv[++i];
        break;
      case "--drop":
        drop = Number(argv[++i]);
        break;
      case "--out-image":
        outImage = argv[++i];
        break;
      default:
        throw new Error(`unknown argument: ${argv[i]}`);
    }
  }
  if (!csv) throw new Error("--csv is required");
  if (!Number.isInteger(drop) || drop < 0) throw new Error("--drop must be a nonnegative integer");
  return { csv, drop, outImage };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error(String(e instanceof Error ? e.message : e));
    return 1;
  }
  try {
    const rows = readSampleCsv(args.csv);
    const fit = fitModel(
      rows.map((r) => r.x),
      rows.map((r) => r.mean),
      args.drop,
    );
    console.log(resultCsvLine(fit));
    if (args.outImage) {
      writeFileSync(args.outImage, renderSvg(rows, fit));
      console.error(`wrote ${args.outImage}`);
    }
    return 0;
  } catch (e) {
    if (e instanceof FitError) {
      console.error(`fit failed: ${e.message}`);
      console.error(`residual trace: ${e.trace.map((v) => v.toExponential(3)).join(" ")}`);
      return 2;
    }
    console.error(String(e instanceof Error ? e.message : e));
    return 1;
  }
}

process.exitCode = main(process.argv.slice(2));
