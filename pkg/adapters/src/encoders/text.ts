/**
 * Text encoder: signed feature hashing over tokens.
 *
 * Each token becomes a one-hot vector at fnv1a(token) mod dim with a sign
 * from a second hash, scaled by inverse document position weight; pooling
 * collapses the token sequence to one utterance vector.  Fully
 * deterministic for a given model version string (the version seeds the
 * hash), standing in for conversation-model logits at desk scale.
 */

import { pool, Pooling } from "../pooling.js";

const FNV_OFFSET = 0x811c9dc5;
const FNV_PRIME = 0x01000193;

export function fnv1a(text: string, seed = FNV_OFFSET): number {
  let hash = seed >>> 0;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, FNV_PRIME) >>> 0;
  }
  return hash >>> 0;
}

export function tokenize(text: string): string[] {
  return text
    .toLowerCase()
    .replace(/[^\p{L}\p{N}\s]+/gu, " ")
    .split(/\s+/)
    .filter((t) => t.length > 0);
}

export interface TextEncoderOptions {
  dim: number;
  modelId: string;
  pooling: Pooling;
}

export const DEFAULT_TEXT_MODEL = "hashed-tokens-v1";

export function encodeText(text: string, options: TextEncoderOptions): number[] {
  const seed = fnv1a(options.modelId);
  const tokens = tokenize(text);
  const frames: number[][] = [];
  for (let position = 0; position < tokens.length; position++) {
    const frame = new Array<number>(options.dim).fill(0);
    const token = tokens[position];
    const slot = fnv1a(token, seed) % options.dim;
    const sign = fnv1a(token, seed ^ 0x9e3779b9) % 2 === 0 ? 1 : -1;
    frame[slot] = sign * (1 + 1 / (1 + position));
    frames.push(frame);
  }
  if (frames.length === 0) {
    frames.push(new Array<number>(options.dim).fill(0));
  }
  return pool(frames, options.pooling);
}
