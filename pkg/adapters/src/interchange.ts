/**
 * The feature interchange format: header line `modality,dim`, then one line
 * per utterance `conversation_id,utterance_index,v1,...,v_dim`, UTF-8 with a
 * trailing newline.  Floats are written in Python-repr form (see pyfloat).
 */

import { pythonRepr } from "./pyfloat.js";

export type Key = [conversationId: string, utteranceIndex: number];

export interface FeatureRow {
  key: Key;
  values: number[];
}

export interface FeatureTable {
  modality: string;
  dim: number;
  rows: FeatureRow[];
}

export function renderTable(table: FeatureTable): string {
  const lines = [`${table.modality},${table.dim}`];
  for (const row of table.rows) {
    const [conversationId, index] = row.key;
    if (conversationId.includes(",") || conversationId.includes("\n")) {
      throw new Error(`conversation id ${JSON.stringify(conversationId)} not representable`);
    }
    if (row.values.length !== table.dim) {
      throw new Error(
        `row (${conversationId}, ${index}): expected ${table.dim} values, got ${row.values.length}`,
      );
    }
    lines.push(`${conversationId},${index},` + row.values.map(pythonRepr).join(","));
  }
  return lines.join("\n") + "\n";
}

export function parseTable(text: string): FeatureTable {
  const lines = text.split("\n").filter((line) => line.length > 0);
  const header = lines[0]?.split(",");
  if (!header || header.length !== 2) {
    throw new Error(`bad header: ${lines[0]}`);
  }
  const dim = parseInt(header[1], 10);
  const rows: FeatureRow[] = [];
  for (const line of lines.slice(1)) {
    const fields = line.split(",");
    if (fields.length !== dim + 2) {
      throw new Error(`expected ${dim + 2} fields, got ${fields.length}: ${line}`);
    }
    rows.push({
      key: [fields[0], parseInt(fields[1], 10)],
      values: fields.slice(2).map(Number),
    });
  }
  return { modality: header[0], dim, rows };
}
