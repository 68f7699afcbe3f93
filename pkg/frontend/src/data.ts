/**
 * Dataset loading against the pipeline's JSON Lines table schema:
 * {"table_id", "relation", "headers"?: [l, r], "rows": [{"left",
 * "right", "context"?}]}.
 *
 * Ablation arms mask fields at load time, so the same model code serves
 * tables-only (T), with contexts (T+C), with headers (T+H) and the full
 * input (T+C+H).
 */

import { readFileSync } from "node:fs";

export const NEGATIVE_LABEL = "__NEGATIVE__";

export interface TableRow {
  left: string;
  right: string;
  context: string;
}

export interface Table {
  tableId: string;
  relation: string;
  leftHeader: string;
  rightHeader: string;
  rows: TableRow[];
}

export type Arm = "T" | "T+C" | "T+H" | "T+C+H";

export function parseTableLine(line: string, where: string): Table {
  let obj: any;
  try {
    obj = JSON.parse(line);
  } catch (err) {
    throw new Error(`${where}: invalid JSON: ${err}`);
  }
  if (typeof obj.table_id !== "string" || typeof obj.relation !== "string") {
    throw new Error(`${where}: table_id and relation must be strings`);
  }
  if (!Array.isArray(obj.rows) || obj.rows.length === 0) {
    throw new Error(`${where}: rows must be a non-empty array`);
  }
  const headers = obj.headers ?? ["", ""];
  if (!Array.isArray(headers) || headers.length !== 2) {
    throw new Error(`${where}: headers must be a [left, right] pair`);
  }
  const rows: TableRow[] = obj.rows.map((r: any, i: number) => {
    if (typeof r.left !== "string" || typeof r.right !== "string") {
      throw new Error(`${where}: row ${i} cells must be strings`);
    }
    return { left: r.left, right: r.right, context: typeof r.context === "string" ? r.context : "" };
  });
  return {
    tableId: obj.table_id,
    relation: obj.relation,
    leftHeader: typeof headers[0] === "string" ? headers[0] : "",
    rightHeader: typeof headers[1] === "string" ? headers[1] : "",
    rows,
  };
}

export function loadTables(path: string): Table[] {
  const payload = readFileSync(path, "utf-8");
  return payload
    .split("\n")
    .map((line, i) => ({ line: line.trim(), where: `${path}:${i + 1}` }))
    .filter(({ line }) => line.length > 0)
    .map(({ line, where }) => parseTableLine(line, where));
}

/** Drop the metadata the arm does not use. */
export function applyArm(table: Table, arm: Arm): Table {
  const useContext = arm === "T+C" || arm === "T+C+H";
  const useHeaders = arm === "T+H" || arm === "T+C+H";
  return {
    ...table,
    leftHeader: useHeaders ? table.leftHeader : "",
    rightHeader: useHeaders ? table.rightHeader : "",
    rows: table.rows.map((r) => ({ ...r, context: useContext ? r.context : "" })),
  };
}

/** Sorted relation labels -> class indices; stable across runs. */
export class LabelVocab {
  readonly labels: string[];
  private index: Map<string, number>;

  constructor(labels: string[]) {
    this.labels = [...labels];
    this.index = new Map(this.labels.map((label, i) => [label, i]));
  }

  static fromTables(tables: Table[]): LabelVocab {
    const seen = new Set<string>(tables.map((t) => t.relation));
    seen.add(NEGATIVE_LABEL);
    return new LabelVocab(Array.from(seen).sort());
  }

  get size(): number {
    return this.labels.length;
  }

  id(label: string): number {
    const id = this.index.get(label);
    if (id === undefined) throw new Error(`unknown relation label ${label}`);
    return id;
  }

  label(id: number): string {
    if (id < 0 || id >= this.labels.length) throw new Error(`label id ${id} out of range`);
    return this.labels[id];
  }
}

/** Texts feeding vocabulary construction (cells, contexts, headers). */
export function* corpusTexts(tables: Table[]): Generator<string> {
  for (const t of tables) {
    yield t.leftHeader;
    yield t.rightHeader;
    for (const r of t.rows) {
      yield r.left;
      yield r.right;
      yield r.context;
    }
  }
}
