/**
 * Command line for the classifier.
 *
 *   train    --data train.jsonl [--valid valid.jsonl] --out model.json
 *            [--arm T|T+C|T+H|T+C+H] [--preset mini|base] [--epochs N]
 *            [--lr F] [--dropout F] [--batch-size N] [--max-len N] [--seed N]
 *   evaluate --checkpoint model.json --data eval.jsonl --out pred.jsonl
 *            [--arm ...]   (defaults to the arm the checkpoint was trained on)
 *
 * Dataset files use the pipeline's JSON Lines table schema; predictions
 * are scoreable by the pipeline's `score` subcommand.
 */

import { Arm, loadTables } from "./data.js";
import { evaluateFile } from "./evaluate.js";
import { ENCODER_PRESETS, defaultConfig } from "./model.js";
import { loadCheckpoint, saveCheckpoint, trainModel } from "./train.js";

interface Flags {
  [key: string]: string;
}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed flag list near ${key}`);
    }
    flags[key.slice(2)] = argv[i + 1];
  }
  return flags;
}

function requireFlag(flags: Flags, name: string): string {
  const value = flags[name];
  if (value === undefined) throw new Error(`missing required flag --${name}`);
  return value;
}

const ARMS: Arm[] = ["T", "T+C", "T+H", "T+C+H"];

function parseArm(raw: string | undefined, fallback: Arm): Arm {
  if (raw === undefined) return fallback;
  if (!ARMS.includes(raw as Arm)) throw new Error(`unknown arm ${raw}; use one of ${ARMS.join(", ")}`);
  return raw as Arm;
}

function cmdTrain(flags: Flags): number {
  const dataPath = requireFlag(flags, "data");
  const outPath = requireFlag(flags, "out");
  const presetName = flags["preset"] ?? "mini";
  const preset = ENCODER_PRESETS[presetName];
  if (!preset) throw new Error(`unknown encoder preset ${presetName}`);
  const config = defaultConfig({
    encoder: preset,
    epochs: flags["epochs"] ? Number(flags["epochs"]) : 3,
    learningRate: flags["lr"] ? Number(flags["lr"]) : 3e-5,
    dropout: flags["dropout"] ? Number(flags["dropout"]) : 0.5,
    batchSize: flags["batch-size"] ? Number(flags["batch-size"]) : 16,
    maxSequenceLength: flags["max-len"] ? Number(flags["max-len"]) : 256,
    seed: flags["seed"] ? Number(flags["seed"]) : 12_345,
  });
  const arm = parseArm(flags["arm"], "T+C+H");
  const trainTables = loadTables(dataPath);
  const validTables = flags["valid"] ? loadTables(flags["valid"]) : null;
  const { model, history } = trainModel(trainTables, validTables, config, { arm });
  saveCheckpoint(model, arm, outPath);
  const last = history[history.length - 1];
  console.error(
    `saved checkpoint -> ${outPath} (final train_loss=${last.trainLoss.toFixed(4)})`
  );
  return 0;
}

function cmdEvaluate(flags: Flags): number {
  const checkpointPath = requireFlag(flags, "checkpoint");
  const dataPath = requireFlag(flags, "data");
  const outPath = requireFlag(flags, "out");
  const { model, arm: trainedArm } = loadCheckpoint(checkpointPath);
  const arm = parseArm(flags["arm"], trainedArm);
  const count = evaluateFile(model, dataPath, outPath, arm);
  console.error(`wrote ${count} predictions -> ${outPath}`);
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "train") return cmdTrain(parseFlags(rest));
    if (command === "evaluate") return cmdEvaluate(parseFlags(rest));
    console.error("usage: cli.ts <train|evaluate> [flags]");
    return 2;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

import { pathToFileURL } from "node:url";

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
