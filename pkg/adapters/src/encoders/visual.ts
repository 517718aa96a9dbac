/**
 * Visual encoder: whole-frame statistics from PGM/PPM images.
 *
 * Each frame yields a gray histogram of dim-4 bins plus mean, standard
 * deviation, and mean horizontal/vertical gradients; a media reference may
 * list several frame files separated by commas, and pooling collapses the
 * frame sequence.  Face tracking is out of scope; frames are used whole.
 */

import { readFileSync } from "node:fs";

import { pool, Pooling } from "../pooling.js";

export const DEFAULT_VISUAL_MODEL = "frame-stats-v1";

export interface GrayImage {
  width: number;
  height: number;
  pixels: Float64Array; // row-major, [0, 1]
}

function parseHeader(buf: Buffer): { magic: string; width: number; height: number; maxval: number; offset: number } {
  const text = buf.toString("latin1");
  let pos = 0;
  const tokens: string[] = [];
  while (tokens.length < 4 && pos < text.length) {
    while (pos < text.length && /\s/.test(text[pos])) {
      pos++;
    }
    if (text[pos] === "#") {
      while (pos < text.length && text[pos] !== "\n") {
        pos++;
      }
      continue;
    }
    let token = "";
    while (pos < text.length && !/\s/.test(text[pos])) {
      token += text[pos++];
    }
    if (token) {
      tokens.push(token);
    }
  }
  pos++; // single whitespace after maxval
  const [magic, w, h, maxval] = tokens;
  return { magic, width: parseInt(w, 10), height: parseInt(h, 10), maxval: parseInt(maxval, 10), offset: pos };
}

export function readImage(path: string): GrayImage {
  const buf = readFileSync(path);
  const { magic, width, height, maxval, offset } = parseHeader(buf);
  if (!width || !height || !maxval) {
    throw new Error(`${path}: malformed netpbm header`);
  }
  const count = width * height;
  const pixels = new Float64Array(count);
  if (magic === "P5" || magic === "P6") {
    const channels = magic === "P6" ? 3 : 1;
    if (buf.length < offset + count * channels) {
      throw new Error(`${path}: truncated pixel data`);
    }
    for (let i = 0; i < count; i++) {
      if (channels === 1) {
        pixels[i] = buf[offset + i] / maxval;
      } else {
        const r = buf[offset + i * 3];
        const g = buf[offset + i * 3 + 1];
        const b = buf[offset + i * 3 + 2];
        pixels[i] = (0.299 * r + 0.587 * g + 0.114 * b) / maxval;
      }
    }
  } else if (magic === "P2" || magic === "P3") {
    const channels = magic === "P3" ? 3 : 1;
    const numbers = buf
      .toString("latin1", offset)
      .split(/\s+/)
      .filter((t) => t.length > 0)
      .map((t) => parseInt(t, 10));
    if (numbers.length < count * channels) {
      throw new Error(`${path}: truncated pixel data`);
    }
    for (let i = 0; i < count; i++) {
      if (channels === 1) {
        pixels[i] = numbers[i] / maxval;
      } else {
        pixels[i] = (0.299 * numbers[i * 3] + 0.587 * numbers[i * 3 + 1] + 0.114 * numbers[i * 3 + 2]) / maxval;
      }
    }
  } else {
    throw new Error(`${path}: unsupported netpbm magic ${magic}`);
  }
  return { width, height, pixels };
}

export interface VisualEncoderOptions {
  dim: number; // >= 5: (dim-4) histogram bins + mean, std, grad-x, grad-y
  pooling: Pooling;
}

export function encodeFrames(images: GrayImage[], options: VisualEncoderOptions): number[] {
  if (options.dim < 5) {
    throw new Error(`visual dim must be >= 5, got ${options.dim}`);
  }
  const bins = options.dim - 4;
  const frames = images.map((image) => {
    const histogram = new Array<number>(bins).fill(0);
    let sum = 0;
    for (const value of image.pixels) {
      histogram[Math.min(Math.floor(value * bins), bins - 1)] += 1;
      sum += value;
    }
    const count = image.pixels.length;
    const mean = sum / count;
    let variance = 0;
    for (const value of image.pixels) {
      variance += (value - mean) ** 2;
    }
    let gradX = 0;
    let gradY = 0;
    for (let y = 0; y < image.height; y++) {
      for (let x = 0; x < image.width; x++) {
        const i = y * image.width + x;
        if (x + 1 < image.width) {
          gradX += Math.abs(image.pixels[i + 1] - image.pixels[i]);
        }
        if (y + 1 < image.height) {
          gradY += Math.abs(image.pixels[i + image.width] - image.pixels[i]);
        }
      }
    }
    return [
      ...histogram.map((h) => h / count),
      mean,
      Math.sqrt(variance / count),
      gradX / Math.max(image.width - 1, 1) / image.height,
      gradY / Math.max(image.height - 1, 1) / image.width,
    ];
  });
  return pool(frames, options.pooling);
}
