/**
 * Audio encoder: PCM WAV in, framed spectral summary out.
 *
 * Frames of 400 samples (hop 160) are described by log energy, zero
 * crossing rate, and Goertzel magnitudes at dim-2 frequencies spread over
 * the speech band; pooling collapses the frame sequence.  A deterministic
 * stand-in for speech-model hidden states.
 */

import { readFileSync } from "node:fs";

import { pool, Pooling } from "../pooling.js";

export const DEFAULT_AUDIO_MODEL = "spectral-frames-v1";

const FRAME = 400;
const HOP = 160;

export interface WavData {
  sampleRate: number;
  samples: Float64Array; // mono, in [-1, 1]
}

export function readWav(path: string): WavData {
  const buf = readFileSync(path);
  if (buf.length < 44 || buf.toString("ascii", 0, 4) !== "RIFF" || buf.toString("ascii", 8, 12) !== "WAVE") {
    throw new Error(`${path}: not a RIFF/WAVE file`);
  }
  let offset = 12;
  let sampleRate = 0;
  let channels = 0;
  let bitsPerSample = 0;
  let samples: Float64Array | null = null;
  while (offset + 8 <= buf.length) {
    const chunkId = buf.toString("ascii", offset, offset + 4);
    const chunkSize = buf.readUInt32LE(offset + 4);
    const body = offset + 8;
    if (chunkId === "fmt ") {
      const format = buf.readUInt16LE(body);
      if (format !== 1) {
        throw new Error(`${path}: only PCM supported, got format ${format}`);
      }
      channels = buf.readUInt16LE(body + 2);
      sampleRate = buf.readUInt32LE(body + 4);
      bitsPerSample = buf.readUInt16LE(body + 14);
      if (bitsPerSample !== 16) {
        throw new Error(`${path}: only 16-bit PCM supported, got ${bitsPerSample}`);
      }
    } else if (chunkId === "data") {
      const frameCount = Math.floor(chunkSize / 2 / Math.max(channels, 1));
      const mono = new Float64Array(frameCount);
      for (let i = 0; i < frameCount; i++) {
        let acc = 0;
        for (let c = 0; c < channels; c++) {
          acc += buf.readInt16LE(body + (i * channels + c) * 2);
        }
        mono[i] = acc / channels / 32768;
      }
      samples = mono;
    }
    offset = body + chunkSize + (chunkSize % 2);
  }
  if (!samples || !sampleRate) {
    throw new Error(`${path}: missing fmt or data chunk`);
  }
  return { sampleRate, samples };
}

function goertzelMagnitude(frame: Float64Array, start: number, length: number, freq: number, rate: number): number {
  const k = (2 * Math.PI * freq) / rate;
  const coeff = 2 * Math.cos(k);
  let s0 = 0;
  let s1 = 0;
  let s2 = 0;
  for (let i = 0; i < length; i++) {
    s0 = frame[start + i] + coeff * s1 - s2;
    s2 = s1;
    s1 = s0;
  }
  return Math.sqrt(Math.max(s1 * s1 + s2 * s2 - coeff * s1 * s2, 0)) / length;
}

export interface AudioEncoderOptions {
  dim: number; // >= 3: logE + zcr + (dim-2) band magnitudes
  pooling: Pooling;
}

export function encodeAudio(wav: WavData, options: AudioEncoderOptions): number[] {
  if (options.dim < 3) {
    throw new Error(`audio dim must be >= 3, got ${options.dim}`);
  }
  const bands = options.dim - 2;
  const low = 100;
  const high = Math.min(4000, wav.sampleRate / 2 - 1);
  const freqs = Array.from({ length: bands }, (_, b) => low + ((high - low) * b) / Math.max(bands - 1, 1));
  const frames: number[][] = [];
  const total = wav.samples.length;
  for (let start = 0; start + FRAME <= total || (start === 0 && total > 0); start += HOP) {
    const length = Math.min(FRAME, total - start);
    if (length <= 0) {
      break;
    }
    let energy = 0;
    let crossings = 0;
    for (let i = 0; i < length; i++) {
      const v = wav.samples[start + i];
      energy += v * v;
      if (i > 0 && v * wav.samples[start + i - 1] < 0) {
        crossings += 1;
      }
    }
    const frame = [Math.log1p(energy / length), crossings / length];
    for (const freq of freqs) {
      frame.push(goertzelMagnitude(wav.samples, start, length, freq, wav.sampleRate));
    }
    frames.push(frame);
  }
  if (frames.length === 0) {
    throw new Error("audio clip has no samples");
  }
  return pool(frames, options.pooling);
}
