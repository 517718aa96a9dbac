/**
 * Export per-utterance feature vectors in the interchange format.
 *
 *   node dist/src/cli.js --modality audio --corpus corpus.json \
 *     --media-dir media/ --out features_audio.csv [--pooling mean] \
 *     [--dim 16] [--model-id spectral-frames-v1]
 */

import { parseArgs } from "node:util";

import { loadCorpus } from "./corpus.js";
import { assertPooling } from "./pooling.js";
import { AdapterSpec, DEFAULT_SPECS, extract, Modality, writeTable } from "./extract.js";

export function main(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      modality: { type: "string" },
      corpus: { type: "string" },
      "media-dir": { type: "string", default: "." },
      out: { type: "string" },
      pooling: { type: "string" },
      dim: { type: "string" },
      "model-id": { type: "string" },
    },
  });
  const modality = values.modality as Modality | undefined;
  if (!modality || !(modality in DEFAULT_SPECS)) {
    console.error("--modality must be text, audio, or visual");
    return 2;
  }
  if (!values.corpus || !values.out) {
    console.error("--corpus and --out are required");
    return 2;
  }
  const defaults = DEFAULT_SPECS[modality];
  const spec: AdapterSpec = {
    modality,
    modelId: values["model-id"] ?? defaults.modelId,
    pooling: values.pooling ? assertPooling(values.pooling) : defaults.pooling,
    dim: values.dim ? parseInt(values.dim, 10) : defaults.dim,
  };
  const conversations = loadCorpus(values.corpus);
  const { table, skipped } = extract(conversations, values["media-dir"] ?? ".", spec);
  for (const skip of skipped) {
    console.warn(`skipped (${skip.conversationId}, ${skip.index}): ${skip.reason}`);
  }
  writeTable(table, values.out);
  console.log(
    `wrote ${table.rows.length} rows (dim ${table.dim}, model ${spec.modelId}, ` +
      `pooling ${spec.pooling}) -> ${values.out}; skipped ${skipped.length}`,
  );
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
