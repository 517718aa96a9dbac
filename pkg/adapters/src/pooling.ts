/** Pool a sequence of frame/token vectors down to one utterance vector. */

export type Pooling = "mean" | "last" | "cls";

export function pool(frames: number[][], pooling: Pooling): number[] {
  if (frames.length === 0) {
    throw new Error("cannot pool an empty sequence");
  }
  switch (pooling) {
    case "mean": {
      const out = new Array<number>(frames[0].length).fill(0);
      for (const frame of frames) {
        for (let i = 0; i < out.length; i++) {
          out[i] += frame[i];
        }
      }
      return out.map((v) => v / frames.length);
    }
    case "last":
      return [...frames[frames.length - 1]];
    case "cls":
      // first position stands in for a classification token
      return [...frames[0]];
    default:
      throw new Error(`unknown pooling ${pooling satisfies never}`);
  }
}

export function assertPooling(value: string): Pooling {
  if (value === "mean" || value === "last" || value === "cls") {
    return value;
  }
  throw new Error(`pooling must be mean, last, or cls; got ${JSON.stringify(value)}`);
}
