/**
 * The serving loop for the line-JSON wire protocol.
 *
 * One request per line: `{"id": <int>, "s": ..., "v": ..., "o": ...}`.
 * A blank line marks the end of a batch.  Each request gets exactly one
 * `{"id": ..., "logit": ...}` response line; a malformed request gets a
 * `{"id": null, "error": ...}` line instead and serving continues.
 *
 * By default responses are written as soon as requests arrive.  With
 * `shuffle` they are held back and emitted in seeded-random order at each
 * batch boundary, which exercises the parent's id-based reassembly.
 */

import * as readline from "node:readline";
import type { Readable, Writable } from "node:stream";
import type { Rule } from "./rules.js";

export interface ServeOptions {
  shuffle?: boolean;
  seed?: number;
}

/** Tiny deterministic PRNG so shuffled runs are reproducible per seed. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function respondTo(line: string, rule: Rule): string {
  try {
    let request: unknown;
    try {
      request = JSON.parse(line);
    } catch {
      throw new Error("request is not valid JSON");
    }
    if (typeof request !== "object" || request === null || Array.isArray(request)) {
      throw new Error("request must be a JSON object");
    }
    const { id, s, v, o } = request as Record<string, unknown>;
    if (typeof id !== "number" || !Number.isInteger(id)) {
      throw new Error("request id must be an integer");
    }
    if (typeof s !== "string" || typeof v !== "string" || typeof o !== "string") {
      throw new Error("request fields s, v, o must be strings");
    }
    const logit = rule(s, v, o);
    if (!Number.isFinite(logit)) {
      throw new Error("rule produced a non-finite logit");
    }
    return JSON.stringify({ id, logit });
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    return JSON.stringify({ id: null, error: message });
  }
}

export async function serve(
  input: Readable,
  output: Writable,
  rule: Rule,
  options: ServeOptions = {},
): Promise<void> {
  const random = mulberry32(options.seed ?? 0);
  const held: string[] = [];

  const flush = () => {
    for (let i = held.length - 1; i > 0; i--) {
      const j = Math.floor(random() * (i + 1));
      [held[i], held[j]] = [held[j]!, held[i]!];
    }
    for (const line of held) output.write(line + "\n");
    held.length = 0;
  };

  for await (const line of readline.createInterface({ input })) {
    if (line.trim() === "") {
      flush();
      continue;
    }
    const response = respondTo(line, rule);
    if (options.shuffle) {
      held.push(response);
    } else {
      output.write(response + "\n");
    }
  }
  flush(); // end of input with no trailing blank line
}
