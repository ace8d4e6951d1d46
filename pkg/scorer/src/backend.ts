/**
 * Scoring backends produce one logit triple per text; the adapter owns the
 * softmax and the mapping from the backend's label order onto the score schema.
 */

export interface ScorerBackend {
  /** Class name per logit index, e.g. ["positive", "negative", "neutral"]. */
  labels(): string[];
  /** Raw class logits, one row per input text. Must not depend on batch shape. */
  logits(texts: string[]): Promise<number[][]>;
}

export function softmax(logits: number[]): number[] {
  const top = Math.max(...logits);
  const exps = logits.map((v) => Math.exp(v - top));
  const total = exps.reduce((a, b) => a + b, 0);
  return exps.map((v) => v / total);
}

function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

/**
 * Deterministic stand-in backend: logits are a pure function of each text, so
 * outputs are identical for any batching. Used by the tests and by `--mock`;
 * it exercises the full adapter (cleaning, batching, softmax, label mapping)
 * without the model checkpoint.
 */
export class DeterministicBackend implements ScorerBackend {
  constructor(private readonly maxTokens: number = 512) {}

  labels(): string[] {
    // FinBERT's label order, so the index mapping is exercised for real.
    return ["positive", "negative", "neutral"];
  }

  async logits(texts: string[]): Promise<number[][]> {
    return texts.map((text) => {
      const tokens = text.split(/\s+/).slice(0, this.maxTokens).join(" ");
      return [0, 1, 2].map((k) => (fnv1a(`${tokens}#${k}`) % 4000) / 1000 - 2);
    });
  }
}
