#!/usr/bin/env npx tsx
/**
 * Belief-panel renderer.
 *
 * Turns trajectory CSVs (schema: iter,agent,hypothesis,log_belief) into
 * SVG panels showing the belief in the shared hypothesis at one agent,
 * one curve per input file.
 *
 * Usage:
 *   belief-panels render --spec panels.json
 *   belief-panels render a.csv b.csv --theta-tx 2 [--agent 1] --out panel.svg
 *
 * Spec file:
 *   { "panels": [ { "csvs": ["...", ...] | [{"path": ..., "label": ...}],
 *                   "thetaTx": 2, "agent": 1, "out": "panel.svg",
 *                   "title": "..." } ] }
 */

import { readFileSync, writeFileSync } from "fs";
import { basename } from "path";

import { SchemaError, beliefSeries, parseTrajectoryCsv } from "./csv.ts";
import { Curve, renderPanel } from "./svg.ts";

interface CsvRef {
  path: string;
  label?: string;
}

interface Panel {
  csvs: (string | CsvRef)[];
  thetaTx: number;
  agent?: number;
  out: string;
  title?: string;
}

function labelFor(ref: CsvRef): string {
  if (ref.label) return ref.label;
  // trajectory files are named <scenario>_<strategy>_<seed>.csv
  const stem = basename(ref.path).replace(/\.csv$/, "");
  const m = /_((?:traditional|partial-no-sa|partial-sa))_/.exec(`_${stem}_`);
  return m ? m[1] : stem;
}

function renderOnePanel(panel: Panel): void {
  if (!Number.isInteger(panel.thetaTx) || panel.thetaTx < 1) {
    throw new SchemaError(`thetaTx must be a 1-based hypothesis label, got ${panel.thetaTx}`);
  }
  const agent = panel.agent ?? 1;
  const refs = panel.csvs.map((c) => (typeof c === "string" ? { path: c } : c));
  if (refs.length === 0) throw new SchemaError("panel has no input CSVs");

  const curves: Curve[] = [];
  let grid: number[] | null = null;
  let nAgents: number | null = null;
  for (const ref of refs) {
    const table = parseTrajectoryCsv(readFileSync(ref.path, "utf8"), ref.path);
    if (grid === null) {
      grid = table.iterations;
      nAgents = table.nAgents;
    } else if (
      table.nAgents !== nAgents ||
      table.iterations.length !== grid.length ||
      table.iterations.some((it, i) => it !== grid![i])
    ) {
      throw new SchemaError(
        `${ref.path}: iteration grid or agent count differs from ${refs[0].path}`,
      );
    }
    const { x, y } = beliefSeries(table, agent, panel.thetaTx);
    curves.push({ label: labelFor(ref), x, y });
  }
  const svg = renderPanel(curves, {
    title: panel.title ?? `belief in hypothesis ${panel.thetaTx}, agent ${agent}`,
  });
  writeFileSync(panel.out, svg);
}

function parseArgs(argv: string[]): Panel[] {
  if (argv[0] !== "render") {
    throw new SchemaError(`unknown command ${argv[0] ?? "(none)"}; expected 'render'`);
  }
  const rest = argv.slice(1);
  const flags = new Map<string, string>();
  const positional: string[] = [];
  for (let i = 0; i < rest.length; i++) {
    if (rest[i].startsWith("--")) {
      const key = rest[i].slice(2);
      const value = rest[i + 1];
      if (value === undefined) throw new SchemaError(`flag --${key} needs a value`);
      flags.set(key, value);
      i++;
    } else {
      positional.push(rest[i]);
    }
  }
  if (flags.has("spec")) {
    const doc = JSON.parse(readFileSync(flags.get("spec")!, "utf8"));
    if (!Array.isArray(doc.panels)) throw new SchemaError("spec needs a 'panels' array");
    return doc.panels as Panel[];
  }
  if (positional.length === 0) {
    throw new SchemaError("either --spec or positional CSV paths are required");
  }
  if (!flags.has("theta-tx")) throw new SchemaError("--theta-tx is required");
  if (!flags.has("out")) throw new SchemaError("--out is required");
  return [
    {
      csvs: positional,
      thetaTx: Number(flags.get("theta-tx")),
      agent: flags.has("agent") ? Number(flags.get("agent")) : undefined,
      out: flags.get("out")!,
      title: flags.get("title"),
    },
  ];
}

export function main(argv: string[]): number {
  try {
    const panels = parseArgs(argv);
    for (const panel of panels) renderOnePanel(panel);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof SyntaxError || err instanceof Error) {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.ts")) {
  process.exit(main(process.argv.slice(2)));
}
