export { fitModel, modelValue, resultCsvLine, FitError, DEFAULT_INIT } from "./model.js";
export type { FitResult, FitOptions } from "./model.js";
export { parseSampleCsv, readSampleCsv } from "./csv.js";
export type { SampleRow } from "./csv.js";
export { renderSvg } from "./svg.js";
