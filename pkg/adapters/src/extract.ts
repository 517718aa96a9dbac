/**
 * Run one encoder over a corpus slice and export the interchange file.
 *
 * Emits one row per utterance, skipping (with a warning) utterances whose
 * media is missing or unreadable; an unknown model identifier aborts the
 * whole run.  Output is deterministic for a given model identifier.
 */

import { existsSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { Conversation } from "./corpus.js";
import { FeatureRow, FeatureTable, renderTable } from "./interchange.js";
import { Pooling } from "./pooling.js";
import { DEFAULT_AUDIO_MODEL, encodeAudio, readWav } from "./encoders/audio.js";
import { DEFAULT_TEXT_MODEL, encodeText } from "./encoders/text.js";
import { DEFAULT_VISUAL_MODEL, encodeFrames, readImage } from "./encoders/visual.js";

export type Modality = "text" | "audio" | "visual";

export interface AdapterSpec {
  modality: Modality;
  modelId: string;
  pooling: Pooling;
  dim: number;
}

export const DEFAULT_SPECS: Record<Modality, AdapterSpec> = {
  text: { modality: "text", modelId: DEFAULT_TEXT_MODEL, pooling: "mean", dim: 64 },
  audio: { modality: "audio", modelId: DEFAULT_AUDIO_MODEL, pooling: "mean", dim: 16 },
  visual: { modality: "visual", modelId: DEFAULT_VISUAL_MODEL, pooling: "mean", dim: 16 },
};

const KNOWN_MODELS: Record<Modality, string[]> = {
  text: [DEFAULT_TEXT_MODEL],
  audio: [DEFAULT_AUDIO_MODEL],
  visual: [DEFAULT_VISUAL_MODEL],
};

export interface Skipped {
  conversationId: string;
  index: number;
  reason: string;
}

export interface ExtractResult {
  table: FeatureTable;
  skipped: Skipped[];
}

const MEDIA_KEYS: Record<Modality, string[]> = {
  text: [],
  audio: ["audio", "video"],
  visual: ["image", "video", "visual"],
};

function mediaRef(media: Record<string, string>, modality: Modality): string | null {
  for (const key of MEDIA_KEYS[modality]) {
    if (media[key]) {
      return media[key];
    }
  }
  return null;
}

export function extract(
  conversations: Conversation[],
  mediaDir: string,
  spec: AdapterSpec,
): ExtractResult {
  if (!KNOWN_MODELS[spec.modality]?.includes(spec.modelId)) {
    throw new Error(
      `unknown ${spec.modality} model ${JSON.stringify(spec.modelId)}; ` +
        `known: ${KNOWN_MODELS[spec.modality].join(", ")}`,
    );
  }
  const rows: FeatureRow[] = [];
  const skipped: Skipped[] = [];
  for (const conv of conversations) {
    for (const utt of conv.utterances) {
      const key: [string, number] = [conv.id, utt.index];
      try {
        if (spec.modality === "text") {
          rows.push({ key, values: encodeText(utt.text, { dim: spec.dim, modelId: spec.modelId, pooling: spec.pooling }) });
          continue;
        }
        const ref = mediaRef(utt.media, spec.modality);
        if (!ref) {
          skipped.push({ conversationId: conv.id, index: utt.index, reason: "no media reference" });
          continue;
        }
        if (spec.modality === "audio") {
          const path = join(mediaDir, ref);
          if (!existsSync(path)) {
            skipped.push({ conversationId: conv.id, index: utt.index, reason: `missing media ${ref}` });
            continue;
          }
          rows.push({ key, values: encodeAudio(readWav(path), { dim: spec.dim, pooling: spec.pooling }) });
        } else {
          const frames = [];
          let missing: string | null = null;
          for (const name of ref.split(",")) {
            const path = join(mediaDir, name.trim());
            if (!existsSync(path)) {
              missing = name.trim();
              break;
            }
            frames.push(readImage(path));
          }
          if (missing !== null) {
            skipped.push({ conversationId: conv.id, index: utt.index, reason: `missing media ${missing}` });
            continue;
          }
          rows.push({ key, values: encodeFrames(frames, { dim: spec.dim, pooling: spec.pooling }) });
        }
      } catch (error) {
        skipped.push({
          conversationId: conv.id,
          index: utt.index,
          reason: error instanceof Error ? error.message : String(error),
        });
      }
    }
  }
  return { table: { modality: spec.modality, dim: spec.dim, rows }, skipped };
}

export function writeTable(table: FeatureTable, outPath: string): void {
  writeFileSync(outPath, renderTable(table), "utf-8");
}
