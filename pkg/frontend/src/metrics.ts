/**
 * Micro precision/recall/F1 with the abstention convention: predicting
 * the negative label removes the item from the precision denominator,
 * and negative gold entries are excluded from the recall denominator.
 * Mirrors the pipeline scorer so validation logs line up with it.
 */

import { NEGATIVE_LABEL } from "./data.js";

export interface MicroReport {
  precision: number;
  recall: number;
  f1: number;
  nPred: number;
  nGold: number;
  nCorrect: number;
}

export function microF1(
  gold: Map<string, string>,
  pred: Map<string, string>,
  negativeLabel: string = NEGATIVE_LABEL
): MicroReport {
  for (const id of pred.keys()) {
    if (!gold.has(id)) throw new Error(`prediction for unknown id ${id}`);
  }
  let nPred = 0;
  let nGold = 0;
  let nCorrect = 0;
  for (const label of gold.values()) {
    if (label !== negativeLabel) nGold += 1;
  }
  for (const [id, label] of pred.entries()) {
    if (label === negativeLabel) continue;
    nPred += 1;
    if (gold.get(id) === label) nCorrect += 1;
  }
  const precision = nPred > 0 ? nCorrect / nPred : 0;
  const recall = nGold > 0 ? nCorrect / nGold : 0;
  const f1 = precision + recall > 0 ? (2 * precision * recall) / (precision + recall) : 0;
  return { precision, recall, f1, nPred, nGold, nCorrect };
}
