#!/usr/bin/env node
/**
 * Entry point: `abx-plugin-ref --rule constant:0 [--shuffle] [--seed N]`.
 *
 * Reads requests from stdin and writes responses to stdout until
 * end-of-input, per the wire protocol in serve.ts.
 */

import { realpathSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { parseRule } from "./rules.js";
import { serve } from "./serve.js";

interface CliArgs {
  rule: string;
  shuffle: boolean;
  seed: number;
}

export function parseArgs(argv: string[]): CliArgs {
  let rule: string | undefined;
  let shuffle = false;
  let seed = 0;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]!;
    if (arg === "--rule") {
      rule = argv[++i];
      if (rule === undefined) throw new Error("--rule needs a value");
    } else if (arg === "--shuffle") {
      shuffle = true;
    } else if (arg === "--seed") {
      const raw = argv[++i];
      if (raw === undefined) throw new Error("--seed needs a value");
      seed = Number(raw);
      if (!Number.isInteger(seed)) throw new Error(`--seed must be an integer, got ${JSON.stringify(raw)}`);
    } else {
      throw new Error(`unknown argument ${JSON.stringify(arg)}`);
    }
  }
  if (rule === undefined) {
    throw new Error("--rule is required (constant:<x>, length, or table:<file>)");
  }
  return { rule, shuffle, seed };
}

async function main(): Promise<void> {
  const args = parseArgs(process.argv.slice(2));
  const rule = parseRule(args.rule);
  await serve(process.stdin, process.stdout, rule, {
    shuffle: args.shuffle,
    seed: args.seed,
  });
}

// run only as an entry point, not when imported by tests
const entry = process.argv[1];
if (entry !== undefined && import.meta.url === pathToFileURL(realpathSync(entry)).href) {
  main().catch((err) => {
    const message = err instanceof Error ? err.message : String(err);
    process.stderr.write(`abx-plugin-ref: ${message}\n`);
    process.exit(2);
  });
}
