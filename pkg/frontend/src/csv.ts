/**
 * Parser for belief-trajectory CSV files.
 *
 * Schema (produced by the simulation CLI): a header row
 * `iter,agent,hypothesis,log_belief` followed by one row per
 * (iteration, agent, hypothesis) triple.  Agent and hypothesis labels are
 * 1-based; log-beliefs are nonpositive floats (floored at serialization,
 * so always finite).
 */

export interface TrajectoryTable {
  /** recorded iteration numbers, ascending */
  iterations: number[];
  nAgents: number;
  nHypotheses: number;
  /** logBelief[iterIdx][agentIdx][hypIdx], all 0-based here */
  logBelief: number[][][];
}

export class SchemaError extends Error {}

const HEADER = ["iter", "agent", "hypothesis", "log_belief"];

function fail(path: string, line: number, msg: string): never {
  throw new SchemaError(`${path}:${line}: ${msg}`);
}

export function parseTrajectoryCsv(text: string, path = "<csv>"): TrajectoryTable {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) fail(path, 0, "empty file");
  const header = lines[0].split(",").map((c) => c.trim());
  if (header.length !== 4 || !HEADER.every((h, i) => header[i] === h)) {
    fail(path, 1, `bad header ${JSON.stringify(lines[0])}, expected ${HEADER.join(",")}`);
  }
  if (lines.length === 1) fail(path, 1, "no data rows (header only)");

  // first pass: dimensions
  let nAgents = 0;
  let nHypotheses = 0;
  const iterSet: number[] = [];
  const rows: [number, number, number, number][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== 4) fail(path, i + 1, `expected 4 fields, got ${cells.length}`);
    const iter = Number(cells[0]);
    const agent = Number(cells[1]);
    const hyp = Number(cells[2]);
    const logB = Number(cells[3]);
    if (!Number.isInteger(iter) || iter < 0) fail(path, i + 1, `bad iter ${cells[0]}`);
    if (!Number.isInteger(agent) || agent < 1) fail(path, i + 1, `bad agent ${cells[1]}`);
    if (!Number.isInteger(hyp) || hyp < 1) fail(path, i + 1, `bad hypothesis ${cells[2]}`);
    if (!Number.isFinite(logB)) fail(path, i + 1, `bad log_belief ${cells[3]}`);
    if (logB > 1e-9) fail(path, i + 1, `log_belief ${cells[3]} is positive`);
    if (iterSet.length === 0 || iter !== iterSet[iterSet.length - 1]) {
      if (iterSet.length > 0 && iter < iterSet[iterSet.length - 1]) {
        fail(path, i + 1, "iterations out of order");
      }
      iterSet.push(iter);
    }
    nAgents = Math.max(nAgents, agent);
    nHypotheses = Math.max(nHypotheses, hyp);
    rows.push([iter, agent, hyp, logB]);
  }

  const iterIndex = new Map(iterSet.map((it, i) => [it, i]));
  const logBelief: number[][][] = iterSet.map(() =>
    Array.from({ length: nAgents }, () => new Array<number>(nHypotheses).fill(NaN)),
  );
  for (const [iter, agent, hyp, logB] of rows) {
    logBelief[iterIndex.get(iter)!][agent - 1][hyp - 1] = logB;
  }
  // every (iteration, agent, hypothesis) cell must be present exactly once
  if (rows.length !== iterSet.length * nAgents * nHypotheses) {
    fail(
      path,
      lines.length,
      `${rows.length} rows for ${iterSet.length} iterations x ` +
        `${nAgents} agents x ${nHypotheses} hypotheses`,
    );
  }
  for (const block of logBelief) {
    for (const agentRow of block) {
      if (agentRow.some((v) => Number.isNaN(v))) {
        fail(path, lines.length, "duplicate or missing (iter, agent, hypothesis) cells");
      }
    }
  }
  return { iterations: iterSet, nAgents, nHypotheses, logBelief };
}

/** Belief (linear domain) of one hypothesis at one agent across iterations. */
export function beliefSeries(
  table: TrajectoryTable,
  agent: number,
  hypothesis: number,
): { x: number[]; y: number[] } {
  if (agent < 1 || agent > table.nAgents) {
    throw new SchemaError(`agent ${agent} out of range 1..${table.nAgents}`);
  }
  if (hypothesis < 1 || hypothesis > table.nHypotheses) {
    throw new SchemaError(`hypothesis ${hypothesis} out of range 1..${table.nHypotheses}`);
  }
  const y = table.logBelief.map((block) => Math.exp(block[agent - 1][hypothesis - 1]));
  return { x: table.iterations.slice(), y };
}
