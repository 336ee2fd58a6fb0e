/**
 * Figure registry: every figure id maps the harness CSV schema onto one
 * deterministic SVG chart. Sweep figures read results.csv; iteration
 * figures read the trace CSVs.
 */

import path from "path";

import { MetricRow, Trace, readResults, readTraceDir } from "./csv.js";
import { Series, renderChart } from "./svg.js";

const ALGO_ORDER = ["agwwo", "aga", "wwo", "cmt"];

function algoSort(a: string, b: string): number {
  const ia = ALGO_ORDER.indexOf(a);
  const ib = ALGO_ORDER.indexOf(b);
  if (ia !== -1 && ib !== -1) return ia - ib;
  if (ia !== -1) return -1;
  if (ib !== -1) return 1;
  return a < b ? -1 : 1;
}

function mean(values: number[]): number {
  return values.reduce((s, v) => s + v, 0) / values.length;
}

type ResultMetric = "network_energy_j" | "local_energy_j" |
  "time_support_ratio" | "cost_support_ratio";

interface SweepDef {
  sweepVar: string;
  metric: ResultMetric;
  xLabel: string;
  yLabel: string;
  title: string;
}

/** One series per algorithm: metric averaged over seeds per sweep value. */
function sweepFigure(inDir: string, def: SweepDef): string {
  const rows = readResults(path.join(inDir, "results.csv"));
  const matching = rows.filter((r) => r.sweep_var === def.sweepVar);
  if (matching.length === 0) {
    throw new Error(`results.csv has no rows with sweep_var=${def.sweepVar}`);
  }
  const algos = [...new Set(matching.map((r) => r.algorithm))].sort(algoSort);
  const series: Series[] = algos.map((algo) => {
    const mine = matching.filter((r) => r.algorithm === algo);
    const values = [...new Set(mine.map((r) => r.sweep_value))].sort((a, b) => a - b);
    return {
      label: algo,
      x: values,
      y: values.map((v) =>
        mean(mine.filter((r) => r.sweep_value === v).map((r) => r[def.metric]))),
    };
  });
  return renderChart({ title: def.title, xLabel: def.xLabel,
                       yLabel: def.yLabel, series });
}

type TraceMetric = "best_fitness" | "best_energy";

/** Per-iteration mean of a trace column across seeds, per group key. */
function traceSeries(traces: Trace[], keyOf: (t: Trace) => string,
                     metric: TraceMetric,
                     labelSort: (a: string, b: string) => number): Series[] {
  const groups = new Map<string, Trace[]>();
  for (const t of traces) {
    const key = keyOf(t);
    const bucket = groups.get(key) ?? [];
    bucket.push(t);
    groups.set(key, bucket);
  }
  return [...groups.keys()].sort(labelSort).map((key) => {
    const members = groups.get(key)!;
    const len = Math.min(...members.map((t) => t.iteration.length));
    const x: number[] = [];
    const y: number[] = [];
    for (let i = 0; i < len; i++) {
      x.push(members[0].iteration[i]);
      y.push(mean(members.map((t) => t[metric][i])));
    }
    return { label: key, x, y };
  });
}

function sensitivityFigure(inDir: string, sweepVar: string, metric: TraceMetric,
                           prefix: string, yLabel: string, title: string): string {
  const traces = readTraceDir(path.join(inDir, "traces"))
    .filter((t) => t.sweep_var === sweepVar);
  if (traces.length === 0) {
    throw new Error(`no traces with sweep_var=${sweepVar}`);
  }
  const numeric = (a: string, b: string) =>
    Number(a.slice(prefix.length)) - Number(b.slice(prefix.length));
  const series = traceSeries(traces, (t) => `${prefix}${t.sweep_value}`,
                             metric, numeric);
  return renderChart({ title, xLabel: "iteration", yLabel, series });
}

function convergenceFigure(inDir: string): string {
  const traces = readTraceDir(path.join(inDir, "traces"));
  const series = traceSeries(traces, (t) => t.algorithm, "best_fitness", algoSort);
  return renderChart({ title: "Convergence by algorithm", xLabel: "iteration",
                       yLabel: "best fitness", series });
}

const SWEEPS: Record<string, { sweepVar: string; xLabel: string }> = {
  density: { sweepVar: "md_density", xLabel: "MD density (devices per cell)" },
  power: { sweepVar: "max_power_dbm", xLabel: "max transmit power (dBm)" },
  cpu: { sweepVar: "max_cpu_ghz", xLabel: "MD CPU frequency (GHz)" },
};

const METRICS: Record<string, { metric: ResultMetric; yLabel: string; name: string }> = {
  local_energy: { metric: "local_energy_j", yLabel: "total local energy (J)",
                  name: "Total local EC" },
  network_energy: { metric: "network_energy_j", yLabel: "network-wide energy (J)",
                    name: "Network-wide EC" },
  time_ratio: { metric: "time_support_ratio", yLabel: "time support ratio",
                name: "Time support ratio" },
  cost_ratio: { metric: "cost_support_ratio", yLabel: "cost support ratio",
                name: "Cost support ratio" },
};

export const FIGURES: Record<string, (inDir: string) => string> = {};

for (const [sweepKey, sweep] of Object.entries(SWEEPS)) {
  for (const [metricKey, m] of Object.entries(METRICS)) {
    FIGURES[`${metricKey}_vs_${sweepKey}`] = (inDir) =>
      sweepFigure(inDir, {
        sweepVar: sweep.sweepVar, metric: m.metric, xLabel: sweep.xLabel,
        yLabel: m.yLabel, title: `${m.name} vs ${sweep.xLabel}`,
      });
  }
}

FIGURES["fitness_vs_iter_by_V"] = (inDir) =>
  sensitivityFigure(inDir, "solitary_V", "best_fitness", "V=",
                    "best fitness", "Fitness vs iteration by solitary-wave count");
FIGURES["energy_vs_iter_by_V"] = (inDir) =>
  sensitivityFigure(inDir, "solitary_V", "best_energy", "V=",
                    "network-wide energy (J)",
                    "Energy vs iteration by solitary-wave count");
FIGURES["fitness_vs_iter_by_hmax"] = (inDir) =>
  sensitivityFigure(inDir, "max_height", "best_fitness", "h_max=",
                    "best fitness", "Fitness vs iteration by max wave height");
FIGURES["energy_vs_iter_by_hmax"] = (inDir) =>
  sensitivityFigure(inDir, "max_height", "best_energy", "h_max=",
                    "network-wide energy (J)",
                    "Energy vs iteration by max wave height");
FIGURES["convergence_by_algorithm"] = convergenceFigure;

export const FIGURE_IDS = Object.keys(FIGURES);

export function renderFigure(id: string, inDir: string): string {
  const builder = FIGURES[id];
  if (!builder) {
    throw new Error(`unknown figure id "${id}"; known: ${FIGURE_IDS.join(", ")}`);
  }
  return builder(inDir);
}
