/**
 * Minimal reverse-mode autodiff over 2-D float64 tensors.
 *
 * Every value is a matrix [rows, cols]; vectors travel as [1, n]. Ops
 * record backward closures on a module-level tape while one is active
 * (see `withTape`); parameters keep their gradient buffers across steps
 * so mini-batches can accumulate.
 */

import { Rng } from "./rng.js";

export class Tensor {
  data: Float64Array;
  grad: Float64Array | null = null;
  readonly rows: number;
  readonly cols: number;
  requiresGrad: boolean;

  constructor(rows: number, cols: number, data?: Float64Array, requiresGrad = false) {
    this.rows = rows;
    this.cols = cols;
    this.data = data ?? new Float64Array(rows * cols);
    if (data && data.length !== rows * cols) {
      throw new Error(`data length ${data.length} does not match ${rows}x${cols}`);
    }
    this.requiresGrad = requiresGrad;
  }

  get size(): number {
    return this.rows * this.cols;
  }

  at(r: number, c: number): number {
    return this.data[r * this.cols + c];
  }

  ensureGrad(): Float64Array {
    if (!this.grad) this.grad = new Float64Array(this.size);
    return this.grad;
  }

  zeroGrad(): void {
    if (this.grad) this.grad.fill(0);
  }

  toArray(): number[] {
    return Array.from(this.data);
  }

  static zeros(rows: number, cols: number): Tensor {
    return new Tensor(rows, cols);
  }

  static fromArray(rows: number, cols: number, values: number[]): Tensor {
    return new Tensor(rows, cols, Float64Array.from(values));
  }

  /** parameter with scaled-normal init; tracked by the optimizer. */
  static param(rows: number, cols: number, rng: Rng, scale?: number): Tensor {
    const t = new Tensor(rows, cols, undefined, true);
    const s = scale ?? Math.sqrt(2 / (rows + cols));
    for (let i = 0; i < t.size; i++) t.data[i] = rng.normal() * s;
    t.ensureGrad();
    return t;
  }

  static zerosParam(rows: number, cols: number): Tensor {
    const t = new Tensor(rows, cols, undefined, true);
    t.ensureGrad();
    return t;
  }
}

type BackwardFn = () => void;

let tape: BackwardFn[] | null = null;

function record(out: Tensor, inputs: Tensor[], backward: BackwardFn): void {
  if (tape !== null && inputs.some((t) => t.requiresGrad)) {
    out.requiresGrad = true;
    out.ensureGrad();
    tape.push(backward);
  }
}

/** Run `fn` with gradient recording; returns its result and the tape. */
export function withTape<T>(fn: () => T): T {
  if (tape !== null) throw new Error("tape already active");
  tape = [];
  try {
    return fn();
  } catch (err) {
    tape = null;
    throw err;
  }
}

/** Backpropagate from a scalar loss and release the tape. */
export function backward(loss: Tensor): void {
  if (tape === null) throw new Error("no active tape");
  if (loss.size !== 1) throw new Error("backward expects a scalar loss");
  loss.ensureGrad()[0] = 1;
  for (let i = tape.length - 1; i >= 0; i--) tape[i]();
  tape = null;
}

/** Evaluate without recording (inference, metric computation). */
export function noGrad<T>(fn: () => T): T {
  const saved = tape;
  tape = null;
  try {
    return fn();
  } finally {
    tape = saved;
  }
}

export function tapeActive(): boolean {
  return tape !== null;
}

// ---------------------------------------------------------------------------
// ops

export function matmul(a: Tensor, b: Tensor): Tensor {
  if (a.cols !== b.rows) throw new Error(`matmul shape mismatch ${a.cols} vs ${b.rows}`);
  const out = Tensor.zeros(a.rows, b.cols);
  for (let i = 0; i < a.rows; i++) {
    for (let k = 0; k < a.cols; k++) {
      const av = a.data[i * a.cols + k];
      if (av === 0) continue;
      for (let j = 0; j < b.cols; j++) {
        out.data[i * b.cols + j] += av * b.data[k * b.cols + j];
      }
    }
  }
  record(out, [a, b], () => {
    const dOut = out.grad!;
    if (a.requiresGrad) {
      const da = a.ensureGrad();
      for (let i = 0; i < a.rows; i++) {
        for (let j = 0; j < b.cols; j++) {
          const dv = dOut[i * b.cols + j];
          if (dv === 0) continue;
          for (let k = 0; k < a.cols; k++) {
            da[i * a.cols + k] += dv * b.data[k * b.cols + j];
          }
        }
      }
    }
    if (b.requiresGrad) {
      const db = b.ensureGrad();
      for (let i = 0; i < a.rows; i++) {
        for (let k = 0; k < a.cols; k++) {
          const av = a.data[i * a.cols + k];
          if (av === 0) continue;
          for (let j = 0; j < b.cols; j++) {
            db[k * b.cols + j] += av * dOut[i * b.cols + j];
          }
        }
      }
    }
  });
  return out;
}

/** a @ b^T without materializing the transpose. */
export function matmulTransposeB(a: Tensor, b: Tensor): Tensor {
  if (a.cols !== b.cols) throw new Error(`matmulTransposeB shape mismatch ${a.cols} vs ${b.cols}`);
  const out = Tensor.zeros(a.rows, b.rows);
  for (let i = 0; i < a.rows; i++) {
    for (let j = 0; j < b.rows; j++) {
      let sum = 0;
      for (let k = 0; k < a.cols; k++) {
        sum += a.data[i * a.cols + k] * b.data[j * b.cols + k];
      }
      out.data[i * b.rows + j] = sum;
    }
  }
  record(out, [a, b], () => {
    const dOut = out.grad!;
    if (a.requiresGrad) {
      const da = a.ensureGrad();
      for (let i = 0; i < a.rows; i++) {
        for (let j = 0; j < b.rows; j++) {
          const dv = dOut[i * b.rows + j];
          if (dv === 0) continue;
          for (let k = 0; k < a.cols; k++) {
            da[i * a.cols + k] += dv * b.data[j * b.cols + k];
          }
        }
      }
    }
    if (b.requiresGrad) {
      const db = b.ensureGrad();
      for (let i = 0; i < a.rows; i++) {
        for (let j = 0; j < b.rows; j++) {
          const dv = dOut[i * b.rows + j];
          if (dv === 0) continue;
          for (let k = 0; k < a.cols; k++) {
            db[j * b.cols + k] += dv * a.data[i * a.cols + k];
          }
        }
      }
    }
  });
  return out;
}

export function add(a: Tensor, b: Tensor): Tensor {
  if (a.rows !== b.rows || a.cols !== b.cols) throw new Error("add shape mismatch");
  const out = new Tensor(a.rows, a.cols);
  for (let i = 0; i < out.size; i++) out.data[i] = a.data[i] + b.data[i];
  record(out, [a, b], () => {
    const dOut = out.grad!;
    if (a.requiresGrad) {
      const da = a.ensureGrad();
      for (let i = 0; i < dOut.length; i++) da[i] += dOut[i];
    }
    if (b.requiresGrad) {
      const db = b.ensureGrad();
      for (let i = 0; i < dOut.length; i++) db[i] += dOut[i];
    }
  });
  return out;
}

/** x [m,n] + bias [1,n], broadcast over rows. */
export function addBias(x: Tensor, bias: Tensor): Tensor {
  if (bias.rows !== 1 || bias.cols !== x.cols) throw new Error("addBias shape mismatch");
  const out = new Tensor(x.rows, x.cols);
  for (let i = 0; i < x.rows; i++) {
    for (let j = 0; j < x.cols; j++) {
      out.data[i * x.cols + j] = x.data[i * x.cols + j] + bias.data[j];
    }
  }
  record(out, [x, bias], () => {
    const dOut = out.grad!;
    if (x.requiresGrad) {
      const dx = x.ensureGrad();
      for (let i = 0; i < dOut.length; i++) dx[i] += dOut[i];
    }
    if (bias.requiresGrad) {
      const db = bias.ensureGrad();
      for (let i = 0; i < x.rows; i++) {
        for (let j = 0; j < x.cols; j++) db[j] += dOut[i * x.cols + j];
      }
    }
  });
  return out;
}

export function scale(x: Tensor, s: number): Tensor {
  const out = new Tensor(x.rows, x.cols);
  for (let i = 0; i < out.size; i++) out.data[i] = x.data[i] * s;
  record(out, [x], () => {
    const dOut = out.grad!;
    const dx = x.ensureGrad();
    for (let i = 0; i < dOut.length; i++) dx[i] += dOut[i] * s;
  });
  return out;
}

export function relu(x: Tensor): Tensor {
  const out = new Tensor(x.rows, x.cols);
  for (let i = 0; i < out.size; i++) out.data[i] = x.data[i] > 0 ? x.data[i] : 0;
  record(out, [x], () => {
    const dOut = out.grad!;
    const dx = x.ensureGrad();
    for (let i = 0; i < dOut.length; i++) {
      if (x.data[i] > 0) dx[i] += dOut[i];
    }
  });
  return out;
}

export function layerNorm(x: Tensor, gamma: Tensor, beta: Tensor, eps = 1e-5): Tensor {
  const n = x.cols;
  if (gamma.cols !== n || beta.cols !== n) throw new Error("layerNorm shape mismatch");
  const out = new Tensor(x.rows, n);
  const xhat = new Float64Array(x.size);
  const invStd = new Float64Array(x.rows);
  for (let i = 0; i < x.rows; i++) {
    let mean = 0;
    for (let j = 0; j < n; j++) mean += x.data[i * n + j];
    mean /= n;
    let variance = 0;
    for (let j = 0; j < n; j++) {
      const d = x.data[i * n + j] - mean;
      variance += d * d;
    }
    variance /= n;
    const inv = 1 / Math.sqrt(variance + eps);
    invStd[i] = inv;
    for (let j = 0; j < n; j++) {
      const h = (x.data[i * n + j] - mean) * inv;
      xhat[i * n + j] = h;
      out.data[i * n + j] = gamma.data[j] * h + beta.data[j];
    }
  }
  record(out, [x, gamma, beta], () => {
    const dOut = out.grad!;
    if (gamma.requiresGrad) {
      const dg = gamma.ensureGrad();
      for (let i = 0; i < x.rows; i++) {
        for (let j = 0; j < n; j++) dg[j] += dOut[i * n + j] * xhat[i * n + j];
      }
    }
    if (beta.requiresGrad) {
      const db = beta.ensureGrad();
      for (let i = 0; i < x.rows; i++) {
        for (let j = 0; j < n; j++) db[j] += dOut[i * n + j];
      }
    }
    if (x.requiresGrad) {
      const dx = x.ensureGrad();
      for (let i = 0; i < x.rows; i++) {
        let meanDh = 0;
        let meanDhXhat = 0;
        for (let j = 0; j < n; j++) {
          const dh = dOut[i * n + j] * gamma.data[j];
          meanDh += dh;
          meanDhXhat += dh * xhat[i * n + j];
        }
        meanDh /= n;
        meanDhXhat /= n;
        for (let j = 0; j < n; j++) {
          const dh = dOut[i * n + j] * gamma.data[j];
          dx[i * n + j] += invStd[i] * (dh - meanDh - xhat[i * n + j] * meanDhXhat);
        }
      }
    }
  });
  return out;
}

export function softmaxRows(x: Tensor): Tensor {
  const out = new Tensor(x.rows, x.cols);
  const n = x.cols;
  for (let i = 0; i < x.rows; i++) {
    let max = -Infinity;
    for (let j = 0; j < n; j++) max = Math.max(max, x.data[i * n + j]);
    let sum = 0;
    for (let j = 0; j < n; j++) {
      const e = Math.exp(x.data[i * n + j] - max);
      out.data[i * n + j] = e;
      sum += e;
    }
    for (let j = 0; j < n; j++) out.data[i * n + j] /= sum;
  }
  record(out, [x], () => {
    const dOut = out.grad!;
    const dx = x.ensureGrad();
    for (let i = 0; i < x.rows; i++) {
      let dot = 0;
      for (let j = 0; j < n; j++) dot += dOut[i * n + j] * out.data[i * n + j];
      for (let j = 0; j < n; j++) {
        dx[i * n + j] += out.data[i * n + j] * (dOut[i * n + j] - dot);
      }
    }
  });
  return out;
}

/** column means: [m,n] -> [1,n]. */
export function meanRows(x: Tensor): Tensor {
  const out = new Tensor(1, x.cols);
  for (let i = 0; i < x.rows; i++) {
    for (let j = 0; j < x.cols; j++) out.data[j] += x.data[i * x.cols + j];
  }
  for (let j = 0; j < x.cols; j++) out.data[j] /= x.rows;
  record(out, [x], () => {
    const dOut = out.grad!;
    const dx = x.ensureGrad();
    const inv = 1 / x.rows;
    for (let i = 0; i < x.rows; i++) {
      for (let j = 0; j < x.cols; j++) dx[i * x.cols + j] += dOut[j] * inv;
    }
  });
  return out;
}

/** pick one row: [m,n] -> [1,n]. */
export function row(x: Tensor, index: number): Tensor {
  if (index < 0 || index >= x.rows) throw new Error(`row ${index} out of range`);
  const out = new Tensor(1, x.cols);
  out.data.set(x.data.subarray(index * x.cols, (index + 1) * x.cols));
  record(out, [x], () => {
    const dOut = out.grad!;
    const dx = x.ensureGrad();
    for (let j = 0; j < x.cols; j++) dx[index * x.cols + j] += dOut[j];
  });
  return out;
}

/** stack [1,n] rows into [m,n]. */
export function stackRows(rows_: Tensor[]): Tensor {
  const n = rows_[0].cols;
  const out = new Tensor(rows_.length, n);
  rows_.forEach((r, i) => {
    if (r.rows !== 1 || r.cols !== n) throw new Error("stackRows shape mismatch");
    out.data.set(r.data, i * n);
  });
  record(out, rows_, () => {
    const dOut = out.grad!;
    rows_.forEach((r, i) => {
      if (!r.requiresGrad) return;
      const dr = r.ensureGrad();
      for (let j = 0; j < n; j++) dr[j] += dOut[i * n + j];
    });
  });
  return out;
}

/** concat along columns: [m,a],[m,b] -> [m,a+b]. */
export function concatCols(parts: Tensor[]): Tensor {
  const m = parts[0].rows;
  const total = parts.reduce((acc, p) => acc + p.cols, 0);
  const out = new Tensor(m, total);
  let offset = 0;
  for (const p of parts) {
    if (p.rows !== m) throw new Error("concatCols shape mismatch");
    for (let i = 0; i < m; i++) {
      out.data.set(p.data.subarray(i * p.cols, (i + 1) * p.cols), i * total + offset);
    }
    offset += p.cols;
  }
  record(out, parts, () => {
    const dOut = out.grad!;
    let off = 0;
    for (const p of parts) {
      if (p.requiresGrad) {
        const dp = p.ensureGrad();
        for (let i = 0; i < m; i++) {
          for (let j = 0; j < p.cols; j++) dp[i * p.cols + j] += dOut[i * total + off + j];
        }
      }
      off += p.cols;
    }
  });
  return out;
}

/** embedding lookup: rows of table [V,d] selected by ids -> [ids.length, d]. */
export function gatherRows(table: Tensor, ids: number[]): Tensor {
  const d = table.cols;
  const out = new Tensor(ids.length, d);
  ids.forEach((id, i) => {
    if (id < 0 || id >= table.rows) throw new Error(`embedding id ${id} out of range`);
    out.data.set(table.data.subarray(id * d, (id + 1) * d), i * d);
  });
  record(out, [table], () => {
    const dOut = out.grad!;
    const dt = table.ensureGrad();
    ids.forEach((id, i) => {
      for (let j = 0; j < d; j++) dt[id * d + j] += dOut[i * d + j];
    });
  });
  return out;
}

/** inverted dropout; identity when `training` is false or p == 0. */
export function dropout(x: Tensor, p: number, rng: Rng, training: boolean): Tensor {
  if (!training || p <= 0) return x;
  if (p >= 1) throw new Error("dropout probability must be < 1");
  const keep = 1 - p;
  const mask = new Float64Array(x.size);
  const out = new Tensor(x.rows, x.cols);
  for (let i = 0; i < x.size; i++) {
    mask[i] = rng.next() < keep ? 1 / keep : 0;
    out.data[i] = x.data[i] * mask[i];
  }
  record(out, [x], () => {
    const dOut = out.grad!;
    const dx = x.ensureGrad();
    for (let i = 0; i < dOut.length; i++) dx[i] += dOut[i] * mask[i];
  });
  return out;
}

/** softmax cross-entropy of a [1,C] logit row against a class index. */
export function crossEntropy(logits: Tensor, target: number): Tensor {
  if (logits.rows !== 1) throw new Error("crossEntropy expects [1,C] logits");
  if (target < 0 || target >= logits.cols) throw new Error("target out of range");
  let max = -Infinity;
  for (let j = 0; j < logits.cols; j++) max = Math.max(max, logits.data[j]);
  let sumExp = 0;
  for (let j = 0; j < logits.cols; j++) sumExp += Math.exp(logits.data[j] - max);
  const logSumExp = max + Math.log(sumExp);
  const out = new Tensor(1, 1);
  out.data[0] = logSumExp - logits.data[target];
  record(out, [logits], () => {
    const dLoss = out.grad![0];
    const dl = logits.ensureGrad();
    for (let j = 0; j < logits.cols; j++) {
      const softmax = Math.exp(logits.data[j] - logSumExp);
      dl[j] += dLoss * (softmax - (j === target ? 1 : 0));
    }
  });
  return out;
}

export function argmax(values: ArrayLike<number>): number {
  let best = 0;
  for (let i = 1; i < values.length; i++) {
    if (values[i] > values[best]) best = i;  // ties keep the lowest index
  }
  return best;
}
