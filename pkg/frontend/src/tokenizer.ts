/**
 * Word-level tokenizer for the miniature encoder.
 *
 * Text is lowercased and split on non-alphanumeric characters; the
 * vocabulary is built from the training corpus, with reserved slots for
 * the classification, separator, unknown and padding tokens.
 */

export const PAD = "[PAD]";
export const CLS = "[CLS]";
export const SEP = "[SEP]";
export const UNK = "[UNK]";

export function words(text: string): string[] {
  return text.toLowerCase().split(/[^a-z0-9]+/i).filter((w) => w.length > 0);
}

export class Tokenizer {
  readonly vocab: Map<string, number>;
  readonly tokens: string[];

  constructor(tokens: string[]) {
    this.tokens = tokens;
    this.vocab = new Map(tokens.map((tok, i) => [tok, i]));
    for (const reserved of [PAD, CLS, SEP, UNK]) {
      if (!this.vocab.has(reserved)) throw new Error(`vocabulary lacks ${reserved}`);
    }
  }

  static build(texts: Iterable<string>): Tokenizer {
    const seen = new Set<string>();
    for (const text of texts) {
      for (const w of words(text)) seen.add(w);
    }
    return new Tokenizer([PAD, CLS, SEP, UNK, ...Array.from(seen).sort()]);
  }

  get size(): number {
    return this.tokens.length;
  }

  id(token: string): number {
    return this.vocab.get(token) ?? this.vocab.get(UNK)!;
  }

  encodeWords(text: string): number[] {
    return words(text).map((w) => this.id(w));
  }

  /**
   * [CLS] left [SEP] right [SEP] context, truncated to maxLen.
   *
   * The cell tokens are always kept; the context is cut from its end
   * first. Pathologically long cells are clamped at maxLen as a last
   * resort.
   */
  linearizeRow(left: string, right: string, context: string, maxLen: number): number[] {
    const cls = this.id(CLS);
    const sep = this.id(SEP);
    const head = [cls, ...this.encodeWords(left), sep, ...this.encodeWords(right), sep];
    const budget = Math.max(0, maxLen - head.length);
    const contextIds = this.encodeWords(context).slice(0, budget);
    return [...head, ...contextIds].slice(0, maxLen);
  }

  /** [CLS] leftHeader [SEP] rightHeader, truncated to maxLen. */
  linearizeHeaders(leftHeader: string, rightHeader: string, maxLen: number): number[] {
    const ids = [
      this.id(CLS),
      ...this.encodeWords(leftHeader),
      this.id(SEP),
      ...this.encodeWords(rightHeader),
    ];
    return ids.slice(0, maxLen);
  }

  toJSON(): string[] {
    return this.tokens;
  }

  static fromJSON(tokens: string[]): Tokenizer {
    return new Tokenizer(tokens);
  }
}
