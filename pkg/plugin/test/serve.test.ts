import { PassThrough } from "node:stream";
import { describe, expect, it } from "vitest";

import type { Rule } from "../src/rules.js";
import { mulberry32, respondTo, serve } from "../src/serve.js";
import { parseRule } from "../src/rules.js";

const LENGTH: Rule = parseRule("length");

function request(id: number, s: string, v = "verb", o = "object"): string {
  return JSON.stringify({ id, s, v, o });
}

async function run(lines: string[], rule: Rule, options = {}): Promise<string[]> {
  const input = new PassThrough();
  const output = new PassThrough();
  const chunks: string[] = [];
  output.on("data", (chunk) => chunks.push(String(chunk)));
  const finished = serve(input, output, rule, options);
  input.end(lines.map((l) => l + "\n").join(""));
  await finished;
  return chunks
    .join("")
    .split("\n")
    .filter((line) => line !== "");
}

describe("respondTo", () => {
  it("echoes the request id with the rule's logit", () => {
    expect(JSON.parse(respondTo(request(7, "person"), LENGTH))).toEqual({
      id: 7,
      logit: 6,
    });
  });

  it("maps malformed JSON to a null-id error object", () => {
    const parsed = JSON.parse(respondTo("{nope", LENGTH));
    expect(parsed.id).toBeNull();
    expect(parsed.error).toMatch(/not valid JSON/);
  });

  it("rejects non-object requests", () => {
    expect(JSON.parse(respondTo("[1, 2]", LENGTH)).error).toMatch(/object/);
  });

  it("rejects a missing or non-integer id", () => {
    expect(JSON.parse(respondTo('{"s": "a", "v": "b", "o": "c"}', LENGTH)).error).toMatch(/id/);
    expect(JSON.parse(respondTo('{"id": 1.5, "s": "a", "v": "b", "o": "c"}', LENGTH)).error).toMatch(/id/);
  });

  it("rejects non-string event fields", () => {
    const line = '{"id": 1, "s": 3, "v": "b", "o": "c"}';
    expect(JSON.parse(respondTo(line, LENGTH)).error).toMatch(/strings/);
  });
});

describe("serve", () => {
  it("answers each request on its own line, in order", async () => {
    const out = await run([request(0, "a"), request(1, "bb"), ""], LENGTH);
    expect(out.map((l) => JSON.parse(l))).toEqual([
      { id: 0, logit: 1 },
      { id: 1, logit: 2 },
    ]);
  });

  it("keeps serving after a malformed line", async () => {
    const out = await run(["garbage", request(3, "dog"), ""], LENGTH);
    expect(JSON.parse(out[0]!).id).toBeNull();
    expect(JSON.parse(out[1]!)).toEqual({ id: 3, logit: 3 });
  });

  it("handles several batches in one session", async () => {
    const out = await run(
      [request(0, "a"), "", request(1, "bb"), "", request(2, "ccc"), ""],
      LENGTH,
    );
    expect(out.map((l) => JSON.parse(l).id)).toEqual([0, 1, 2]);
  });

  it("round-trips non-ASCII event words", async () => {
    const out = await run([request(9, "äpfel"), ""], LENGTH);
    expect(JSON.parse(out[0]!)).toEqual({ id: 9, logit: 5 });
  });

  describe("shuffle mode", () => {
    const ids = Array.from({ length: 50 }, (_, i) => i);
    const batch = ids.map((i) => request(i, "x".repeat(i + 1)));

    it("emits the same responses in a different order", async () => {
      const out = await run([...batch, ""], LENGTH, { shuffle: true, seed: 1 });
      const got = out.map((l) => JSON.parse(l));
      expect(got.map((r) => r.id)).not.toEqual(ids);
      expect([...got].sort((a, b) => a.id - b.id)).toEqual(
        ids.map((i) => ({ id: i, logit: i + 1 })),
      );
    });

    it("is reproducible for a fixed seed and varies across seeds", async () => {
      const a = await run([...batch, ""], LENGTH, { shuffle: true, seed: 5 });
      const b = await run([...batch, ""], LENGTH, { shuffle: true, seed: 5 });
      const c = await run([...batch, ""], LENGTH, { shuffle: true, seed: 6 });
      expect(a).toEqual(b);
      expect(a).not.toEqual(c);
    });

    it("flushes held responses at end of input without a trailing blank", async () => {
      const out = await run([request(0, "a"), request(1, "bb")], LENGTH, {
        shuffle: true,
      });
      expect(out).toHaveLength(2);
    });

    it("shuffles independently per batch", async () => {
      const out = await run(
        [request(0, "a"), request(1, "bb"), "", request(2, "ccc"), ""],
        LENGTH,
        { shuffle: true, seed: 3 },
      );
      const ids01 = out.slice(0, 2).map((l) => JSON.parse(l).id);
      expect([...ids01].sort()).toEqual([0, 1]);
      expect(JSON.parse(out[2]!).id).toBe(2); // second batch never mixes into the first
    });
  });
});

describe("mulberry32", () => {
  it("is deterministic and stays in [0, 1)", () => {
    const a = mulberry32(42);
    const b = mulberry32(42);
    for (let i = 0; i < 100; i++) {
      const x = a();
      expect(x).toBe(b());
      expect(x).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThan(1);
    }
  });
});
