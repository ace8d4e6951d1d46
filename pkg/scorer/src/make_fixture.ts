/**
 * Regenerates fixtures/sample_scores.jsonl from the 40-headline fixture using the
 * deterministic backend, so downstream consumers can validate the score-file
 * contract without the model checkpoint.
 */

import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { DeterministicBackend } from "./backend.js";
import { scoreFile } from "./scorer.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixtures = join(here, "..", "..", "fixtures");

const written = await scoreFile(
  join(fixtures, "headlines_40.csv"),
  join(fixtures, "sample_scores.jsonl"),
  new DeterministicBackend(),
  { batchSize: 32 },
);
console.log(`wrote ${written} fixture scores`);
