/** Batch inference: one prediction line per dataset table, in the
 * pipeline scorer's JSON Lines format {"table_id", "pred"}. */

import { writeFileSync } from "node:fs";

import { Arm, Table, applyArm, loadTables } from "./data.js";
import { RelationClassifier } from "./model.js";

export function predictTables(
  model: RelationClassifier,
  tables: Table[],
  arm: Arm
): Map<string, string> {
  const predictions = new Map<string, string>();
  for (const table of tables) {
    if (predictions.has(table.tableId)) {
      throw new Error(`duplicate table id ${table.tableId} in evaluation input`);
    }
    predictions.set(table.tableId, model.predict(applyArm(table, arm)));
  }
  return predictions;
}

export function writePredictions(predictions: Map<string, string>, path: string): number {
  const lines: string[] = [];
  for (const [tableId, pred] of predictions.entries()) {
    lines.push(JSON.stringify({ table_id: tableId, pred }));
  }
  writeFileSync(path, lines.join("\n") + (lines.length ? "\n" : ""));
  return lines.length;
}

export function evaluateFile(
  model: RelationClassifier,
  dataPath: string,
  outPath: string,
  arm: Arm
): number {
  const tables = loadTables(dataPath);
  const predictions = predictTables(model, tables, arm);
  return writePredictions(predictions, outPath);
}
