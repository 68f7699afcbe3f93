/**
 * Joint training of both branches with cross-entropy on the summed
 * scores, Adam updates, per-epoch validation metrics and JSON
 * checkpoints carrying the label vocabulary.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { Arm, LabelVocab, Table, applyArm, corpusTexts } from "./data.js";
import { microF1 } from "./metrics.js";
import { ModelConfig, RelationClassifier, validateConfig } from "./model.js";
import { Rng } from "./rng.js";
import { Tensor, backward, crossEntropy, scale, withTape } from "./tensor.js";
import { Tokenizer } from "./tokenizer.js";

export class Adam {
  private m: Float64Array[];
  private v: Float64Array[];
  private step_ = 0;

  constructor(
    private params: Tensor[],
    private lr: number,
    private beta1: number,
    private beta2: number,
    private epsilon: number
  ) {
    this.m = params.map((p) => new Float64Array(p.size));
    this.v = params.map((p) => new Float64Array(p.size));
  }

  step(): void {
    this.step_ += 1;
    const bc1 = 1 - Math.pow(this.beta1, this.step_);
    const bc2 = 1 - Math.pow(this.beta2, this.step_);
    this.params.forEach((p, idx) => {
      const grad = p.grad;
      if (!grad) return;
      const m = this.m[idx];
      const v = this.v[idx];
      for (let i = 0; i < p.size; i++) {
        const g = grad[i];
        m[i] = this.beta1 * m[i] + (1 - this.beta1) * g;
        v[i] = this.beta2 * v[i] + (1 - this.beta2) * g * g;
        const mHat = m[i] / bc1;
        const vHat = v[i] / bc2;
        p.data[i] -= (this.lr * mHat) / (Math.sqrt(vHat) + this.epsilon);
      }
    });
  }

  zeroGrads(): void {
    for (const p of this.params) p.zeroGrad();
  }
}

export interface EpochStats {
  epoch: number;
  trainLoss: number;
  validF1: number | null;
  validAccuracy: number | null;
}

export interface TrainResult {
  model: RelationClassifier;
  history: EpochStats[];
}

export interface TrainOptions {
  arm?: Arm;
  quiet?: boolean;
}

/** Validation micro-F1/accuracy of a model over already-masked tables. */
export function evaluateTables(
  model: RelationClassifier,
  tables: Table[]
): { f1: number; accuracy: number } {
  const gold = new Map<string, string>();
  const pred = new Map<string, string>();
  let correct = 0;
  tables.forEach((table, i) => {
    const id = `${i}:${table.tableId}`;  // split files may reuse ids across relations
    const predicted = model.predict(table);
    gold.set(id, table.relation);
    pred.set(id, predicted);
    if (predicted === table.relation) correct += 1;
  });
  return { f1: microF1(gold, pred).f1, accuracy: tables.length ? correct / tables.length : 0 };
}

export function trainModel(
  trainTables: Table[],
  validTables: Table[] | null,
  config: ModelConfig,
  options: TrainOptions = {}
): TrainResult {
  validateConfig(config);
  const arm = options.arm ?? "T+C+H";
  const train = trainTables.map((t) => applyArm(t, arm));
  const valid = validTables ? validTables.map((t) => applyArm(t, arm)) : null;

  const labels = LabelVocab.fromTables(train);
  for (const t of train) labels.id(t.relation); // unknown labels fail fast
  const tokenizer = Tokenizer.build(corpusTexts(train));
  const model = new RelationClassifier(config, tokenizer, labels);

  const params = model.namedParams().map(([, p]) => p);
  const adam = new Adam(params, config.learningRate, config.beta1, config.beta2, config.epsilon);
  const shuffleRng = new Rng(config.seed ^ 0x5eed);
  const dropoutRng = new Rng(config.seed ^ 0xd0d0);

  const history: EpochStats[] = [];
  for (let epoch = 1; epoch <= config.epochs; epoch++) {
    const order = shuffleRng.shuffle(train.map((_, i) => i));
    let epochLoss = 0;
    for (let start = 0; start < order.length; start += config.batchSize) {
      const batch = order.slice(start, start + config.batchSize);
      adam.zeroGrads();
      for (const tableIdx of batch) {
        const table = train[tableIdx];
        withTape(() => {
          const scores = model.forward(table, { training: true, dropoutRng });
          const loss = crossEntropy(scores.final, labels.id(table.relation));
          epochLoss += loss.data[0];
          backward(scale(loss, 1 / batch.length));
        });
      }
      adam.step();
    }
    const stats: EpochStats = {
      epoch,
      trainLoss: epochLoss / train.length,
      validF1: null,
      validAccuracy: null,
    };
    if (valid && valid.length > 0) {
      const metrics = evaluateTables(model, valid);
      stats.validF1 = metrics.f1;
      stats.validAccuracy = metrics.accuracy;
    }
    history.push(stats);
    if (!options.quiet) {
      const validPart =
        stats.validF1 === null
          ? ""
          : ` valid_f1=${stats.validF1.toFixed(4)} valid_acc=${stats.validAccuracy!.toFixed(4)}`;
      console.error(
        `epoch ${epoch}/${config.epochs} arm=${arm} train_loss=${stats.trainLoss.toFixed(4)}${validPart}`
      );
    }
  }
  return { model, history };
}

interface CheckpointPayload {
  format: string;
  arm: Arm;
  config: ModelConfig;
  labels: string[];
  vocab: string[];
  params: Record<string, number[]>;
}

export function saveCheckpoint(
  model: RelationClassifier,
  arm: Arm,
  path: string
): void {
  const payload: CheckpointPayload = {
    format: "table-relation-classifier/1",
    arm,
    config: model.config,
    labels: model.labels.labels,
    vocab: model.tokenizer.toJSON(),
    params: Object.fromEntries(model.namedParams().map(([name, p]) => [name, p.toArray()])),
  };
  writeFileSync(path, JSON.stringify(payload));
}

export function loadCheckpoint(path: string): { model: RelationClassifier; arm: Arm } {
  const payload = JSON.parse(readFileSync(path, "utf-8")) as CheckpointPayload;
  if (payload.format !== "table-relation-classifier/1") {
    throw new Error(`${path}: not a classifier checkpoint`);
  }
  const tokenizer = Tokenizer.fromJSON(payload.vocab);
  const labels = new LabelVocab(payload.labels);
  const model = new RelationClassifier(payload.config, tokenizer, labels);
  const byName = new Map(model.namedParams());
  for (const [name, values] of Object.entries(payload.params)) {
    const param = byName.get(name);
    if (!param) throw new Error(`${path}: unexpected parameter ${name}`);
    if (param.size !== values.length) {
      throw new Error(
        `${path}: parameter ${name} has ${values.length} values, expected ${param.size}`
      );
    }
    param.data.set(values);
    byName.delete(name);
  }
  if (byName.size > 0) {
    throw new Error(`${path}: checkpoint is missing parameters (${byName.size} absent)`);
  }
  return { model, arm: payload.arm };
}
