/**
 * Real model backend on transformers.js. The package is an optional dependency
 * (its native subdependencies cannot always be installed), so it is imported
 * dynamically and only when a model directory is actually requested. The
 * checkpoint directory must be local; no network access happens at run time.
 */

import { existsSync, readFileSync } from "node:fs";
import { join } from "node:path";
import type { ScorerBackend } from "./backend.js";

// Typed as plain string so tsc treats the import as opaque: the package is
// optional and may be absent at build time.
const PACKAGE: string = "@xenova/transformers";

export class TransformersBackend implements ScorerBackend {
  private constructor(
    private readonly tokenizer: any,
    private readonly model: any,
    private readonly id2label: string[],
    private readonly maxTokens: number,
  ) {}

  static async load(modelDir: string, maxTokens = 512): Promise<TransformersBackend> {
    if (!existsSync(modelDir)) {
      throw new Error(`model checkpoint directory not found: ${modelDir}`);
    }
    const configPath = join(modelDir, "config.json");
    if (!existsSync(configPath)) {
      throw new Error(`model directory has no config.json: ${modelDir}`);
    }
    const config = JSON.parse(readFileSync(configPath, "utf-8"));
    const id2label: string[] = [];
    for (const [key, value] of Object.entries(config.id2label ?? {})) {
      id2label[Number(key)] = String(value).toLowerCase();
    }
    if (id2label.length !== 3) {
      throw new Error(`expected 3 sentiment classes in id2label, got ${id2label.length}`);
    }
    let transformers: any;
    try {
      transformers = await import(PACKAGE);
    } catch {
      throw new Error(
        `${PACKAGE} is not installed; install it (with network access) to score ` +
        `with a real checkpoint, or use --mock`,
      );
    }
    transformers.env.allowRemoteModels = false;
    transformers.env.localModelPath = "";
    const tokenizer = await transformers.AutoTokenizer.from_pretrained(modelDir, {
      local_files_only: true,
    });
    const model = await transformers.AutoModelForSequenceClassification.from_pretrained(
      modelDir,
      { local_files_only: true },
    );
    return new TransformersBackend(tokenizer, model, id2label, maxTokens);
  }

  labels(): string[] {
    return this.id2label;
  }

  async logits(texts: string[]): Promise<number[][]> {
    const inputs = await this.tokenizer(texts, {
      padding: true,
      truncation: true,
      max_length: this.maxTokens,
    });
    const output = await this.model(inputs);
    const [rows, cols] = output.logits.dims;
    const flat: Float32Array = output.logits.data;
    const out: number[][] = [];
    for (let i = 0; i < rows; i++) {
      out.push(Array.from(flat.subarray(i * cols, (i + 1) * cols)));
    }
    return out;
  }
}
