/** Minimal reader for the canonical conversation corpus JSON. */

import { readFileSync } from "node:fs";

export interface Utterance {
  index: number;
  speaker: string;
  text: string;
  media: Record<string, string>;
}

export interface Conversation {
  id: string;
  utterances: Utterance[];
}

interface RawUtterance {
  index: number;
  speaker: string;
  text: string;
  media?: Record<string, string>;
}

interface RawConversation {
  id: string;
  utterances: RawUtterance[];
}

function fromRaw(raw: RawConversation): Conversation {
  return {
    id: String(raw.id),
    utterances: raw.utterances.map((u) => ({
      index: u.index,
      speaker: u.speaker,
      text: u.text,
      media: u.media ?? {},
    })),
  };
}

/** Accepts either a plain list of conversations or a train/dev/test object. */
export function loadCorpus(path: string): Conversation[] {
  const parsed = JSON.parse(readFileSync(path, "utf-8"));
  if (Array.isArray(parsed)) {
    return parsed.map(fromRaw);
  }
  if (parsed && typeof parsed === "object") {
    const out: Conversation[] = [];
    for (const split of ["train", "dev", "test"]) {
      if (Array.isArray(parsed[split])) {
        out.push(...parsed[split].map(fromRaw));
      }
    }
    if (out.length > 0) {
      return out;
    }
  }
  throw new Error(`${path}: expected a conversation list or a train/dev/test object`);
}
