/** Layers built on the tensor ops, each exposing named parameters. */

import { Rng } from "./rng.js";
import {
  Tensor,
  add,
  addBias,
  concatCols,
  layerNorm,
  matmul,
  matmulTransposeB,
  relu,
  scale,
  softmaxRows,
} from "./tensor.js";

export type NamedParams = Array<[string, Tensor]>;

export class Linear {
  weight: Tensor;
  bias: Tensor;

  constructor(inDim: number, outDim: number, rng: Rng) {
    this.weight = Tensor.param(inDim, outDim, rng);
    this.bias = Tensor.zerosParam(1, outDim);
  }

  forward(x: Tensor): Tensor {
    return addBias(matmul(x, this.weight), this.bias);
  }

  params(prefix: string): NamedParams {
    return [
      [`${prefix}.weight`, this.weight],
      [`${prefix}.bias`, this.bias],
    ];
  }
}

export class LayerNormModule {
  gamma: Tensor;
  beta: Tensor;

  constructor(dim: number) {
    this.gamma = Tensor.zerosParam(1, dim);
    this.gamma.data.fill(1);
    this.beta = Tensor.zerosParam(1, dim);
  }

  forward(x: Tensor): Tensor {
    return layerNorm(x, this.gamma, this.beta);
  }

  params(prefix: string): NamedParams {
    return [
      [`${prefix}.gamma`, this.gamma],
      [`${prefix}.beta`, this.beta],
    ];
  }
}

/** Scaled dot-product self-attention with per-head projections. */
export class MultiHeadAttention {
  private heads: Array<{ wq: Tensor; wk: Tensor; wv: Tensor }>;
  private out: Linear;
  private headDim: number;

  constructor(dim: number, nHeads: number, rng: Rng) {
    if (dim % nHeads !== 0) throw new Error("dim must be divisible by nHeads");
    this.headDim = dim / nHeads;
    this.heads = [];
    for (let h = 0; h < nHeads; h++) {
      this.heads.push({
        wq: Tensor.param(dim, this.headDim, rng),
        wk: Tensor.param(dim, this.headDim, rng),
        wv: Tensor.param(dim, this.headDim, rng),
      });
    }
    this.out = new Linear(dim, dim, rng);
  }

  forward(x: Tensor): Tensor {
    const outputs: Tensor[] = [];
    for (const head of this.heads) {
      const q = matmul(x, head.wq);
      const k = matmul(x, head.wk);
      const v = matmul(x, head.wv);
      const scores = scale(matmulTransposeB(q, k), 1 / Math.sqrt(this.headDim));
      const attn = softmaxRows(scores);
      outputs.push(matmul(attn, v));
    }
    return this.out.forward(outputs.length === 1 ? outputs[0] : concatCols(outputs));
  }

  params(prefix: string): NamedParams {
    const named: NamedParams = [];
    this.heads.forEach((head, h) => {
      named.push([`${prefix}.h${h}.wq`, head.wq]);
      named.push([`${prefix}.h${h}.wk`, head.wk]);
      named.push([`${prefix}.h${h}.wv`, head.wv]);
    });
    named.push(...this.out.params(`${prefix}.out`));
    return named;
  }
}

/** Post-norm transformer encoder layer: LN(x + MHA(x)), LN(y + FFN(y)). */
export class TransformerLayer {
  attention: MultiHeadAttention;
  norm1: LayerNormModule;
  ff1: Linear;
  ff2: Linear;
  norm2: LayerNormModule;

  constructor(dim: number, nHeads: number, ffDim: number, rng: Rng) {
    this.attention = new MultiHeadAttention(dim, nHeads, rng);
    this.norm1 = new LayerNormModule(dim);
    this.ff1 = new Linear(dim, ffDim, rng);
    this.ff2 = new Linear(ffDim, dim, rng);
    this.norm2 = new LayerNormModule(dim);
  }

  forward(x: Tensor): Tensor {
    const attended = this.norm1.forward(add(x, this.attention.forward(x)));
    const fed = this.ff2.forward(relu(this.ff1.forward(attended)));
    return this.norm2.forward(add(attended, fed));
  }

  params(prefix: string): NamedParams {
    return [
      ...this.attention.params(`${prefix}.attn`),
      ...this.norm1.params(`${prefix}.norm1`),
      ...this.ff1.params(`${prefix}.ff1`),
      ...this.ff2.params(`${prefix}.ff2`),
      ...this.norm2.params(`${prefix}.norm2`),
    ];
  }
}
