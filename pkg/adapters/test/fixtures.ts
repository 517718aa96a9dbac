/** Deterministic toy inputs: a 3-utterance corpus, WAV clips, PGM frames. */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

export function writeToyCorpus(dir: string): string {
  const corpus = [
    {
      id: "toy1",
      utterances: [
        {
          index: 1,
          speaker: "Ana",
          text: "So what do you call this animal?",
          emotion: "neutral",
          media: { audio: "u1.wav", image: "u1.pgm" },
        },
        {
          index: 2,
          speaker: "Ben",
          text: "Yes! You are so smart! I love you.",
          emotion: "joy",
          media: { audio: "u2.wav", image: "u2.pgm,u2b.pgm" },
        },
        {
          index: 3,
          speaker: "Ana",
          text: "I love you too.",
          emotion: "joy",
          media: { audio: "u3.wav", image: "u3.pgm" },
        },
      ],
      pairs: [[3, "joy", 2]],
    },
  ];
  const path = join(dir, "toy_corpus.json");
  writeFileSync(path, JSON.stringify(corpus, null, 1));
  return path;
}

/** 16-bit PCM mono WAV holding a sine mixed with a slower sine. */
export function writeWav(path: string, freq: number, seconds = 0.2, rate = 16000): void {
  const count = Math.floor(seconds * rate);
  const data = Buffer.alloc(count * 2);
  for (let i = 0; i < count; i++) {
    const t = i / rate;
    const value = 0.6 * Math.sin(2 * Math.PI * freq * t) + 0.2 * Math.sin(2 * Math.PI * (freq / 3) * t);
    data.writeInt16LE(Math.round(value * 32767 * 0.8), i * 2);
  }
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "ascii");
  header.writeUInt32LE(36 + data.length, 4);
  header.write("WAVE", 8, "ascii");
  header.write("fmt ", 12, "ascii");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(1, 20); // PCM
  header.writeUInt16LE(1, 22); // mono
  header.writeUInt32LE(rate, 24);
  header.writeUInt32LE(rate * 2, 28);
  header.writeUInt16LE(2, 32);
  header.writeUInt16LE(16, 34);
  header.write("data", 36, "ascii");
  header.writeUInt32LE(data.length, 40);
  writeFileSync(path, Buffer.concat([header, data]));
}

/** Binary PGM with a deterministic gradient-plus-checker pattern. */
export function writePgm(path: string, width: number, height: number, phase: number): void {
  const header = Buffer.from(`P5\n${width} ${height}\n255\n`, "latin1");
  const pixels = Buffer.alloc(width * height);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const checker = (Math.floor(x / 4) + Math.floor(y / 4) + phase) % 2 === 0 ? 40 : 0;
      pixels[y * width + x] = Math.min(255, Math.floor((255 * x) / width / 2 + (255 * y) / height / 2 + checker));
    }
  }
  writeFileSync(path, Buffer.concat([header, pixels]));
}

export function writeToyMedia(dir: string): string {
  const media = join(dir, "media");
  mkdirSync(media, { recursive: true });
  writeWav(join(media, "u1.wav"), 220);
  writeWav(join(media, "u2.wav"), 440);
  writeWav(join(media, "u3.wav"), 880);
  writePgm(join(media, "u1.pgm"), 32, 24, 0);
  writePgm(join(media, "u2.pgm"), 32, 24, 1);
  writePgm(join(media, "u2b.pgm"), 32, 24, 0);
  writePgm(join(media, "u3.pgm"), 24, 24, 1);
  return media;
}
