/**
 * TSV formats shared with the simulation driver.
 *
 * Training / dev files: lemma <TAB> tags <TAB> form, tags ';'-joined.
 * Predict input:        id <TAB> lemma <TAB> tags.
 * Prediction dump:      id, lemma, tags, rank (1-based), form, log-likelihood.
 */

import { Example } from "./vocab.js";

export interface PredictItem {
  id: number;
  lemma: string;
  tags: string[];
}

export interface Hypothesis {
  form: string;
  logLikelihood: number;
}

export function parseTrainTsv(text: string): Example[] {
  const examples: Example[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (line === "") continue;
    const fields = line.split("\t");
    if (fields.length !== 3 || fields.some((f) => f === "")) {
      throw new Error(`line ${i + 1}: expected 3 non-empty tab-separated fields`);
    }
    examples.push({ lemma: fields[0], tags: fields[1].split(";"), form: fields[2] });
  }
  return examples;
}

export function parsePredictTsv(text: string): PredictItem[] {
  const items: PredictItem[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (line === "") continue;
    const fields = line.split("\t");
    if (fields.length !== 3 || fields.some((f) => f === "")) {
      throw new Error(`line ${i + 1}: expected 3 non-empty tab-separated fields`);
    }
    const id = Number(fields[0]);
    if (!Number.isInteger(id)) {
      throw new Error(`line ${i + 1}: bad example id ${fields[0]}`);
    }
    items.push({ id, lemma: fields[1], tags: fields[2].split(";") });
  }
  return items;
}

/** One dump block per item: contiguous 1-based ranks, ll non-increasing. */
export function formatDump(
  items: PredictItem[],
  hypotheses: Hypothesis[][]
): string {
  if (items.length !== hypotheses.length) {
    throw new Error("items/hypotheses length mismatch");
  }
  const rows: string[] = [];
  for (let i = 0; i < items.length; i++) {
    const item = items[i];
    const tags = item.tags.join(";");
    hypotheses[i].forEach((h, j) => {
      if (!Number.isFinite(h.logLikelihood) || h.logLikelihood > 0) {
        throw new Error(`example ${item.id}: bad log-likelihood ${h.logLikelihood}`);
      }
      rows.push(
        `${item.id}\t${item.lemma}\t${tags}\t${j + 1}\t${h.form}\t${h.logLikelihood}`
      );
    });
  }
  return rows.map((r) => r + "\n").join("");
}
