/**
 * Scoring rules for the reference plugin.
 *
 * A rule maps one (subject, verb, object) event to a finite logit.  Three
 * toy rules are enough to exercise every corner of the wire protocol:
 * `constant:c`, `length` (the subject's character count), and `table:file`
 * (lookup in a TSV of per-event scores).
 *
 * A real model would slot in here as just another Rule: load the weights in
 * the factory below, return a closure that runs inference per event.  The
 * parent process never sees the difference -- line-delimited requests in,
 * one response per id out.
 */

import { readFileSync } from "node:fs";

export type Rule = (s: string, v: string, o: string) => number;

function eventKey(s: string, v: string, o: string): string {
  return `${s}\t${v}\t${o}`;
}

export function loadTable(path: string): Map<string, number> {
  const table = new Map<string, number>();
  const text = readFileSync(path, "utf8");
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!;
    if (line.trim() === "" || line.startsWith("#")) continue;
    const parts = line.split("\t");
    if (parts.length !== 4) {
      throw new Error(`table line ${i + 1}: expected 4 tab-separated fields`);
    }
    const logit = Number(parts[3]);
    if (!Number.isFinite(logit)) {
      throw new Error(`table line ${i + 1}: logit ${JSON.stringify(parts[3])} is not a finite number`);
    }
    table.set(eventKey(parts[0]!, parts[1]!, parts[2]!), logit);
  }
  return table;
}

export function parseRule(spec: string): Rule {
  if (spec.startsWith("constant:")) {
    const value = Number(spec.slice("constant:".length));
    if (!Number.isFinite(value)) {
      throw new Error(`constant rule needs a finite number, got ${JSON.stringify(spec)}`);
    }
    return () => value;
  }
  if (spec === "length") {
    return (s) => s.length;
  }
  if (spec.startsWith("table:")) {
    const table = loadTable(spec.slice("table:".length));
    // events absent from the table score 0 (an even-odds logit), keeping
    // the "finite logit for every request" guarantee
    return (s, v, o) => table.get(eventKey(s, v, o)) ?? 0;
  }
  throw new Error(`unknown rule ${JSON.stringify(spec)} (expected constant:<x>, length, or table:<file>)`);
}
