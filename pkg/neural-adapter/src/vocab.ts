/**
 * Token vocabularies for the character-level inflection model.
 *
 * The encoder consumes lemma characters followed by a separator and the
 * morphosyntactic tags as atomic tokens; the decoder emits form characters.
 * Index 0 is always PAD so that padded batches mask out cleanly.
 */

export const PAD = "<pad>";
export const SOS = "<s>";
export const EOS = "</s>";
export const UNK = "<unk>";
export const SEP = "<sep>";

export interface Example {
  lemma: string;
  tags: string[];
  form: string;
}

export class Vocab {
  readonly tokens: string[];
  private readonly index: Map<string, number>;

  constructor(tokens: string[]) {
    this.tokens = tokens;
    this.index = new Map(tokens.map((t, i) => [t, i]));
  }

  get size(): number {
    return this.tokens.length;
  }

  id(token: string): number {
    return this.index.get(token) ?? this.index.get(UNK)!;
  }

  token(id: number): string {
    if (id < 0 || id >= this.tokens.length) {
      throw new RangeError(`token id ${id} out of range`);
    }
    return this.tokens[id];
  }

  toJSON(): string[] {
    return this.tokens;
  }
}

function sortedUnique(items: Iterable<string>): string[] {
  return [...new Set(items)].sort();
}

/** Encoder-side vocabulary: specials, then characters, then tag tokens. */
export function buildInputVocab(examples: Example[]): Vocab {
  const chars = new Set<string>();
  const tags = new Set<string>();
  for (const ex of examples) {
    for (const ch of ex.lemma) chars.add(ch);
    for (const tag of ex.tags) tags.add(tag);
  }
  return new Vocab([PAD, UNK, SEP, ...sortedUnique(chars), ...sortedUnique(tags)]);
}

/** Decoder-side vocabulary: specials then form characters. */
export function buildOutputVocab(examples: Example[]): Vocab {
  const chars = new Set<string>();
  for (const ex of examples) {
    for (const ch of ex.form) chars.add(ch);
  }
  return new Vocab([PAD, SOS, EOS, UNK, ...sortedUnique(chars)]);
}

export function encodeInput(vocab: Vocab, lemma: string, tags: string[]): number[] {
  return [
    ...[...lemma].map((ch) => vocab.id(ch)),
    vocab.id(SEP),
    ...tags.map((tag) => vocab.id(tag)),
  ];
}

export function padTo(ids: number[], length: number): number[] {
  if (ids.length > length) return ids.slice(0, length);
  return [...ids, ...Array(length - ids.length).fill(0)];
}
