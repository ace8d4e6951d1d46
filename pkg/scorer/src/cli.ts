#!/usr/bin/env node
/**
 * score --in <headlines.csv> --out <scores.jsonl> --model-dir <checkpoint> [--batch 32]
 *
 * `--mock` swaps in the deterministic backend (no checkpoint needed); the output
 * still exercises the full schema contract. Exit codes: 0 success, 1 usage,
 * 2 data/model error.
 */

import { existsSync } from "node:fs";
import { DeterministicBackend } from "./backend.js";
import { scoreFile } from "./scorer.js";
import { TransformersBackend } from "./transformers_backend.js";

interface Args {
  input: string;
  output: string;
  modelDir: string;
  batch: number;
  mock: boolean;
}

function usage(message?: string): never {
  if (message) {
    console.error(`error: ${message}`);
  }
  console.error(
    "usage: finbert-score score --in <headlines.csv> --out <scores.jsonl> " +
    "(--model-dir <path> | --mock) [--batch 32]",
  );
  process.exit(1);
}

function parseArgs(argv: string[]): Args {
  if (argv[0] !== "score") {
    usage(`unknown command '${argv[0] ?? ""}'`);
  }
  const args: Args = { input: "", output: "", modelDir: "", batch: 32, mock: false };
  for (let i = 1; i < argv.length; i++) {
    const flag = argv[i];
    const next = () => {
      const v = argv[++i];
      if (v === undefined) usage(`${flag} needs a value`);
      return v;
    };
    if (flag === "--in") args.input = next();
    else if (flag === "--out") args.output = next();
    else if (flag === "--model-dir") args.modelDir = next();
    else if (flag === "--batch") args.batch = Number(next());
    else if (flag === "--mock") args.mock = true;
    else usage(`unknown flag '${flag}'`);
  }
  if (!args.input || !args.output) usage("--in and --out are required");
  if (!args.mock && !args.modelDir) usage("either --model-dir or --mock is required");
  if (!Number.isInteger(args.batch) || args.batch < 1) usage("--batch must be a positive integer");
  return args;
}

async function main(): Promise<number> {
  const args = parseArgs(process.argv.slice(2));
  try {
    if (!existsSync(args.input)) {
      throw new Error(`input file not found: ${args.input}`);
    }
    const backend = args.mock
      ? new DeterministicBackend()
      : await TransformersBackend.load(args.modelDir);
    const written = await scoreFile(args.input, args.output, backend, { batchSize: args.batch });
    console.log(`scored ${written} headlines -> ${args.output}`);
    return 0;
  } catch (err) {
    console.error(`finbert-score: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
}

main().then((code) => process.exit(code));
