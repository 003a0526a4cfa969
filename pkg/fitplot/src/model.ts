/**
 * The decay model for mean logarithmic complexity against x = log10(n):
 *
 *   y = a / (x^2 + b*x + c) + d
 *
 * fitted by Levenberg-Marquardt with the analytic Jacobian. The damping
 * schedule is deterministic, so a given dataset and initialization always
 * produce the same parameters, and the residual sum never increases from
 * one accepted iteration to the next.
 */

export interface FitResult {
  a: number;
  b: number;
  c: number;
  d: number;
  rss: number;
  dropCount: number;
  iterations: number;
  /** residual sum after every accepted step, starting at the initial guess */
  trace: number[];
}

export const DEFAULT_INIT: [number, number, number, number] = [30, 10, 200, 3.3];

export function modelValue(p: ArrayLike<number>, x: number): number {
  const q = x * x + p[1] * x + p[2];
  return p[0] / q + p[3];
}

function residuals(p: number[], xs: number[], ys: number[]): number[] {
  return xs.map((x, i) => modelValue(p, x) - ys[i]);
}

function rssOf(r: number[]): number {
  return r.reduce((s, v) => s + v * v, 0);
}

/** rows of the 4x4 normal-equation system from the analytic Jacobian */
function normalEquations(
  p: number[],
  xs: number[],
  r: number[],
): { jtj: number[][]; jtr: number[] } {
  const jtj = Array.from({ length: 4 }, () => [0, 0, 0, 0]);
  const jtr = [0, 0, 0, 0];
  for (let i = 0; i < xs.length; i++) {
    const x = xs[i];
    const q = x * x + p[1] * x + p[2];
    const row = [1 / q, (-p[0] * x) / (q * q), -p[0] / (q * q), 1];
    for (let u = 0; u < 4; u++) {
      jtr[u] += row[u] * r[i];
      for (let v = u; v < 4; v++) {
        jtj[u][v] += row[u] * row[v];
      }
    }
  }
  for (let u = 0; u < 4; u++) {
    for (let v = 0; v < u; v++) {
      jtj[u][v] = jtj[v][u];
    }
  }
  return { jtj, jtr };
}

/** solve (A + lambda*diag(A)) s = -g by Gaussian elimination */
function solveDamped(A: number[][], g: number[], lambda: number): number[] | null {
  const m = A.map((row, i) =>
    row.map((v, j) => (i === j ? v * (1 + lambda) : v)).concat(-g[i]),
  );
  for (let col = 0; col < 4; col++) {
    let piv = col;
    for (let r2 = col + 1; r2 < 4; r2++) {
      if (Math.abs(m[r2][col]) > Math.abs(m[piv][col])) piv = r2;
    }
    if (Math.abs(m[piv][col]) < 1e-300) return null;
    [m[col], m[piv]] = [m[piv], m[col]];
    for (let r2 = col + 1; r2 < 4; r2++) {
      const f = m[r2][col] / m[col][col];
      for (let c2 = col; c2 <= 4; c2++) m[r2][c2] -= f * m[col][c2];
    }
  }
  const s = [0, 0, 0, 0];
  for (let row = 3; row >= 0; row--) {
    let acc = m[row][4];
    for (let c2 = row + 1; c2 < 4; c2++) acc -= m[row][c2] * s[c2];
    s[row] = acc / m[row][row];
  }
  return s;
}

export class FitError extends Error {
  constructor(message: string, public readonly trace: number[]) {
    super(message);
  }
}

export interface FitOptions {
  init?: [number, number, number, number];
  maxIterations?: number;
  tolerance?: number;
}

export function fitModel(
  xs: number[],
  ys: number[],
  dropCount: number,
  options: FitOptions = {},
): FitResult {
  if (xs.length !== ys.length) throw new Error("x/y length mismatch");
  const x = xs.slice(dropCount);
  const y = ys.slice(dropCount);
  if (x.length < 6) {
    throw new Error(`need at least 6 retained rows, got ${x.length}`);
  }
  const maxIter = options.maxIterations ?? 500;
  const tol = options.tolerance ?? 1e-14;
  let p = (options.init ?? DEFAULT_INIT).slice();
  let r = residuals(p, x, y);
  let rss = rssOf(r);
  const trace = [rss];
  let lambda = 1e-3;
  let iterations = 0;

  for (let it = 0; it < maxIter; it++) {
    const { jtj, jtr } = normalEquations(p, x, r);
    let accepted = false;
    for (let attempt = 0; attempt < 40; attempt++) {
      const step = solveDamped(jtj, jtr, lambda);
      if (step !== null) {
        const cand = p.map((v, i) => v + step[i]);
        const candR = residuals(cand, x, y);
        const candRss = rssOf(candR);
        if (Number.isFinite(candRss) && candRss <= rss) {
          const gain = rss - candRss;
          p = cand;
          r = candR;
          rss = candRss;
          trace.push(rss);
          lambda = Math.max(lambda / 3, 1e-12);
          accepted = true;
          iterations = it + 1;
          if (gain < tol * (1 + rss)) {
            return finish(p, rss, dropCount, iterations, trace, x);
          }
          break;
        }
      }
      lambda *= 4;
    }
    if (!accepted) {
      if (trace.length > 1) {
        return finish(p, rss, dropCount, iterations, trace, x); // converged: no step improves
      }
      throw new FitError("no damping made the first step acceptable", trace);
    }
  }
  throw new FitError(`no convergence after ${maxIter} iterations`, trace);
}

function finish(
  p: number[],
  rss: number,
  dropCount: number,
  iterations: number,
  trace: number[],
  xs: number[],
): FitResult {
  for (const x of xs) {
    if (x * x + p[1] * x + p[2] <= 0) {
      throw new FitError(
        `fitted denominator not positive at x=${x}`,
        trace,
      );
    }
  }
  return { a: p[0], b: p[1], c: p[2], d: p[3], rss, dropCount, iterations, trace };
}

export function resultCsvLine(fit: FitResult): string {
  const f = (v: number) => v.toPrecision(8);
  return [
    `a=${f(fit.a)}`,
    `b=${f(fit.b)}`,
    `c=${f(fit.c)}`,
    `d=${f(fit.d)}`,
    `rss=${fit.rss.toExponential(4)}`,
    `drop=${fit.dropCount}`,
    `iters=${fit.iterations}`,
  ].join(",");
}
