/**
 * Readers for the experiment harness outputs: results.csv and the
 * per-run trace CSVs. Inputs are never modified.
 */

import { readFileSync, readdirSync } from "fs";
import path from "path";

export const RESULTS_HEADER =
  "sweep_var,sweep_value,algorithm,seed,network_energy_j,local_energy_j," +
  "time_support_ratio,cost_support_ratio,best_fitness,wall_time_s";

export const TRACE_HEADER =
  "iteration,best_fitness,avg_fitness,best_energy,diversity";

export interface MetricRow {
  sweep_var: string;
  sweep_value: number;
  algorithm: string;
  seed: number;
  network_energy_j: number;
  local_energy_j: number;
  time_support_ratio: number;
  cost_support_ratio: number;
  best_fitness: number;
  wall_time_s: number;
}

export interface Trace {
  sweep_var: string;
  sweep_value: number;
  algorithm: string;
  seed: number;
  iteration: number[];
  best_fitness: number[];
  avg_fitness: number[];
  best_energy: number[];
  diversity: number[];
}

function lines(text: string): string[] {
  return text.split("\n").filter((l) => l.length > 0);
}

export function readResults(file: string): MetricRow[] {
  const content = readFileSync(file, "utf8");
  const rows = lines(content);
  if (rows.length === 0 || rows[0] !== RESULTS_HEADER) {
    throw new Error(`${file}: expected results header "${RESULTS_HEADER}"`);
  }
  if (rows.length === 1) {
    throw new Error(`${file}: no data rows`);
  }
  return rows.slice(1).map((line, n) => {
    const parts = line.split(",");
    if (parts.length !== 10) {
      throw new Error(`${file}: malformed row ${n + 2}`);
    }
    return {
      sweep_var: parts[0],
      sweep_value: Number(parts[1]),
      algorithm: parts[2],
      seed: Number(parts[3]),
      network_energy_j: Number(parts[4]),
      local_energy_j: Number(parts[5]),
      time_support_ratio: Number(parts[6]),
      cost_support_ratio: Number(parts[7]),
      best_fitness: Number(parts[8]),
      wall_time_s: Number(parts[9]),
    };
  });
}

const TRACE_NAME = /^trace__(.+)__(.+)__([a-z]+)__s(\d+)\.csv$/;

export function readTrace(file: string): Trace {
  const name = path.basename(file);
  const match = TRACE_NAME.exec(name);
  if (!match) {
    throw new Error(`${file}: trace file name does not match the trace__ pattern`);
  }
  const content = readFileSync(file, "utf8");
  const rows = lines(content);
  if (rows.length === 0 || rows[0] !== TRACE_HEADER) {
    throw new Error(`${file}: expected trace header "${TRACE_HEADER}"`);
  }
  const trace: Trace = {
    sweep_var: match[1],
    sweep_value: Number(match[2]),
    algorithm: match[3],
    seed: Number(match[4]),
    iteration: [],
    best_fitness: [],
    avg_fitness: [],
    best_energy: [],
    diversity: [],
  };
  for (const line of rows.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== 5) {
      throw new Error(`${file}: malformed trace row`);
    }
    trace.iteration.push(Number(parts[0]));
    trace.best_fitness.push(Number(parts[1]));
    trace.avg_fitness.push(Number(parts[2]));
    trace.best_energy.push(Number(parts[3]));
    trace.diversity.push(Number(parts[4]));
  }
  return trace;
}

export function readTraceDir(dir: string): Trace[] {
  let names: string[];
  try {
    names = readdirSync(dir);
  } catch {
    throw new Error(`trace directory not found: ${dir}`);
  }
  const traces = names
    .filter((n) => TRACE_NAME.test(n))
    .sort()
    .map((n) => readTrace(path.join(dir, n)));
  if (traces.length === 0) {
    throw new Error(`no trace files in ${dir}`);
  }
  return traces;
}
