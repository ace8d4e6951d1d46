/**
 * Batch scoring loop: read the headline file, score cleaned headlines in
 * minibatches, and write one JSON line per headline with the three class
 * probabilities summing to 1.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { softmax, type ScorerBackend } from "./backend.js";
import { cleanHeadline } from "./preprocess.js";
import { parseHeadlineCsv, toJsonLine, type HeadlineRow, type ScoreRow } from "./schema.js";

export interface ScoreOptions {
  batchSize: number;
}

function labelIndex(labels: string[], wanted: string): number {
  const at = labels.findIndex((l) => l.startsWith(wanted));
  if (at < 0) {
    throw new Error(`backend labels ${JSON.stringify(labels)} lack a '${wanted}' class`);
  }
  return at;
}

export async function scoreHeadlines(
  rows: HeadlineRow[],
  backend: ScorerBackend,
  opts: ScoreOptions = { batchSize: 32 },
): Promise<ScoreRow[]> {
  if (rows.length === 0) {
    throw new Error("no headlines to score");
  }
  if (opts.batchSize < 1) {
    throw new Error(`batch size must be >= 1, got ${opts.batchSize}`);
  }
  const labels = backend.labels();
  const neg = labelIndex(labels, "negative");
  const neu = labelIndex(labels, "neutral");
  const pos = labelIndex(labels, "positive");
  const out: ScoreRow[] = [];
  for (let start = 0; start < rows.length; start += opts.batchSize) {
    const batch = rows.slice(start, start + opts.batchSize);
    const logits = await backend.logits(batch.map((r) => cleanHeadline(r.headline)));
    if (logits.length !== batch.length) {
      throw new Error(`backend returned ${logits.length} rows for a batch of ${batch.length}`);
    }
    for (let i = 0; i < batch.length; i++) {
      const probs = softmax(logits[i]);
      out.push({
        date: batch[i].date,
        headline: batch[i].headline,
        p_neg: probs[neg],
        p_neu: probs[neu],
        p_pos: probs[pos],
        goldstein: batch[i].goldstein,
      });
    }
  }
  return out;
}

export async function scoreFile(
  inPath: string,
  outPath: string,
  backend: ScorerBackend,
  opts: ScoreOptions = { batchSize: 32 },
): Promise<number> {
  const rows = parseHeadlineCsv(readFileSync(inPath, "utf-8"));
  const scored = await scoreHeadlines(rows, backend, opts);
  writeFileSync(outPath, scored.map(toJsonLine).join("\n") + "\n", "utf-8");
  return scored.length;
}
