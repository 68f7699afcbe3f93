/**
 * Two-branch relation classifier.
 *
 * Row branch: every row is linearized to [CLS] left [SEP] right [SEP]
 * context and encoded by a small bidirectional transformer; the per-row
 * [CLS] vectors pass through one more transformer layer that attends
 * across rows (no positional encoding, rows are a set), are mean-pooled
 * into a table vector, and mapped to per-relation scores.
 *
 * Header branch: [CLS] leftHeader [SEP] rightHeader through a separate
 * encoder instance, then its own score head.
 *
 * The final score vector is the elementwise sum of the two branches;
 * prediction is the argmax with ties broken toward the lowest index.
 */

import { LabelVocab, Table } from "./data.js";
import { NamedParams, Linear, TransformerLayer } from "./nn.js";
import { Rng } from "./rng.js";
import {
  Tensor,
  add,
  argmax,
  dropout,
  gatherRows,
  meanRows,
  noGrad,
  row,
  scale,
  stackRows,
} from "./tensor.js";
import { Tokenizer } from "./tokenizer.js";

export interface EncoderShape {
  layers: number;
  dim: number;
  heads: number;
  ffDim: number;
}

/** Named encoder sizes; "base" mirrors a standard 12-layer text encoder,
 * "mini" is the desk-scale variant used by tests and experiments. */
export const ENCODER_PRESETS: Record<string, EncoderShape> = {
  base: { layers: 12, dim: 768, heads: 12, ffDim: 3072 },
  mini: { layers: 1, dim: 32, heads: 2, ffDim: 64 },
};

export interface ModelConfig {
  learningRate: number;
  beta1: number;
  beta2: number;
  epsilon: number;
  dropout: number;
  batchSize: number;
  maxSequenceLength: number;
  epochs: number;
  seed: number;
  encoder: EncoderShape;
}

export function defaultConfig(overrides: Partial<ModelConfig> = {}): ModelConfig {
  const config: ModelConfig = {
    learningRate: 3e-5,
    beta1: 0.9,
    beta2: 0.999,
    epsilon: 1e-8,
    dropout: 0.5,
    batchSize: 16,
    maxSequenceLength: 256,
    epochs: 3,
    seed: 12_345,
    encoder: ENCODER_PRESETS.base,
    ...overrides,
  };
  validateConfig(config);
  return config;
}

export function validateConfig(config: ModelConfig): void {
  if (!Number.isInteger(config.epochs) || config.epochs < 1 || config.epochs > 5) {
    throw new Error(`epochs must be an integer in [1, 5], got ${config.epochs}`);
  }
  if (config.maxSequenceLength < 4) throw new Error("maxSequenceLength too small");
  if (config.dropout < 0 || config.dropout >= 1) throw new Error("dropout must be in [0, 1)");
  if (config.batchSize < 1) throw new Error("batchSize must be >= 1");
  if (config.encoder.dim % config.encoder.heads !== 0) {
    throw new Error("encoder dim must be divisible by head count");
  }
}

/** Per-branch and summed score vectors for one table. */
export interface TableScores {
  rowBranch: Tensor;
  headerBranch: Tensor;
  final: Tensor;
}

class TextEncoder {
  tokenEmbedding: Tensor;
  positionEmbedding: Tensor;
  layers: TransformerLayer[];

  constructor(vocabSize: number, maxLen: number, shape: EncoderShape, rng: Rng) {
    this.tokenEmbedding = Tensor.param(vocabSize, shape.dim, rng, 0.1);
    this.positionEmbedding = Tensor.param(maxLen, shape.dim, rng, 0.1);
    this.layers = [];
    for (let i = 0; i < shape.layers; i++) {
      this.layers.push(new TransformerLayer(shape.dim, shape.heads, shape.ffDim, rng));
    }
  }

  /** token ids -> contextual [CLS] vector [1, dim]. */
  encode(ids: number[]): Tensor {
    const positions = ids.map((_, i) => i);
    let x = add(gatherRows(this.tokenEmbedding, ids), gatherRows(this.positionEmbedding, positions));
    for (const layer of this.layers) x = layer.forward(x);
    return row(x, 0);
  }

  params(prefix: string): NamedParams {
    const named: NamedParams = [
      [`${prefix}.tok`, this.tokenEmbedding],
      [`${prefix}.pos`, this.positionEmbedding],
    ];
    this.layers.forEach((layer, i) => named.push(...layer.params(`${prefix}.layer${i}`)));
    return named;
  }
}

export interface ForwardOptions {
  training?: boolean;
  dropoutRng?: Rng;
  /** test hooks: silence one branch before the sum */
  zeroRowBranch?: boolean;
  zeroHeaderBranch?: boolean;
}

export class RelationClassifier {
  readonly config: ModelConfig;
  readonly tokenizer: Tokenizer;
  readonly labels: LabelVocab;
  rowEncoder: TextEncoder;
  rowSetLayer: TransformerLayer;
  rowHead: Linear;
  headerEncoder: TextEncoder;
  headerHead: Linear;

  constructor(config: ModelConfig, tokenizer: Tokenizer, labels: LabelVocab) {
    validateConfig(config);
    this.config = config;
    this.tokenizer = tokenizer;
    this.labels = labels;
    const rng = new Rng(config.seed);
    const shape = config.encoder;
    this.rowEncoder = new TextEncoder(tokenizer.size, config.maxSequenceLength, shape, rng.fork(1));
    this.rowSetLayer = new TransformerLayer(shape.dim, shape.heads, shape.ffDim, rng.fork(2));
    this.rowHead = new Linear(shape.dim, labels.size, rng.fork(3));
    // separately instantiated weights: the branches share nothing
    this.headerEncoder = new TextEncoder(tokenizer.size, config.maxSequenceLength, shape, rng.fork(4));
    this.headerHead = new Linear(shape.dim, labels.size, rng.fork(5));
  }

  forward(table: Table, options: ForwardOptions = {}): TableScores {
    if (table.rows.length === 0) throw new Error(`table ${table.tableId} has no rows`);
    const training = options.training ?? false;
    const dropRng = options.dropoutRng ?? new Rng(0);
    const maxLen = this.config.maxSequenceLength;

    const rowVectors = table.rows.map((r) =>
      this.rowEncoder.encode(this.tokenizer.linearizeRow(r.left, r.right, r.context, maxLen))
    );
    const attended = this.rowSetLayer.forward(stackRows(rowVectors));
    const tableVector = meanRows(attended);
    let rowBranch = this.rowHead.forward(
      dropout(tableVector, this.config.dropout, dropRng, training)
    );

    const headerIds = this.tokenizer.linearizeHeaders(table.leftHeader, table.rightHeader, maxLen);
    const headerVector = this.headerEncoder.encode(headerIds);
    let headerBranch = this.headerHead.forward(
      dropout(headerVector, this.config.dropout, dropRng, training)
    );

    if (options.zeroRowBranch) rowBranch = scale(rowBranch, 0);
    if (options.zeroHeaderBranch) headerBranch = scale(headerBranch, 0);
    return { rowBranch, headerBranch, final: add(rowBranch, headerBranch) };
  }

  /** argmax relation label for one table (inference mode). */
  predict(table: Table, options: ForwardOptions = {}): string {
    return noGrad(() => {
      const scores = this.forward(table, { ...options, training: false });
      return this.labels.label(argmax(scores.final.data));
    });
  }

  namedParams(): NamedParams {
    return [
      ...this.rowEncoder.params("row.enc"),
      ...this.rowSetLayer.params("row.set"),
      ...this.rowHead.params("row.head"),
      ...this.headerEncoder.params("hdr.enc"),
      ...this.headerHead.params("hdr.head"),
    ];
  }
}

/** Elementwise check used by tests and assertions: final == row + header. */
export function additivityGap(scores: TableScores): number {
  let worst = 0;
  for (let i = 0; i < scores.final.size; i++) {
    const gap = Math.abs(
      scores.final.data[i] - (scores.rowBranch.data[i] + scores.headerBranch.data[i])
    );
    worst = Math.max(worst, gap);
  }
  return worst;
}
