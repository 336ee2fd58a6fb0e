"""Experiment harness: config loading, sweep grids, metrics, CSV output.

A run is a grid of independent cells (sweep value, algorithm,
replicate). Scenario and optimizer seeds derive from (master_seed,
replicate) only, so parameter sweeps hold the random draws fixed per
replicate (paired comparisons across sweep values and algorithms) while
replicates stay independent.

Results CSV columns (fixed order):
    sweep_var, sweep_value, algorithm, seed, network_energy_j,
    local_energy_j, time_support_ratio, cost_support_ratio,
    best_fitness, wall_time_s
Trace CSVs are written one per cell as
    trace__{sweep_var}__{value}__{algorithm}__s{replicate}.csv
with columns iteration, best_fitness, avg_fitness, best_energy,
diversity.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from multiprocessing import get_context
from typing import List, Optional, Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .encoding import wave_to_json
from .optimizers import ALGORITHMS, OptimizerConfig, RunTrace
from .scenario import ConfigurationError, ScenarioParams, build_scenario
from .sysmodel import EvaluationReport
from .units import dbm_to_watts, ghz_to_hz, kb_to_bits

SWEEP_VARS = ("md_density", "max_power_dbm", "max_cpu_ghz", "solitary_V",
              "max_height", "none")

CSV_HEADER = ("sweep_var,sweep_value,algorithm,seed,network_energy_j,"
              "local_energy_j,time_support_ratio,cost_support_ratio,"
              "best_fitness,wall_time_s")


@dataclass(frozen=True)
class ExperimentSpec:
    sweep_var: str = "none"
    sweep_values: tuple = (0,)
    algorithms: tuple = ("agwwo", "aga", "wwo", "cmt")
    seeds_per_point: int = 1
    master_seed: int = 0
    emit_traces: bool = False
    scenario: ScenarioParams = field(default_factory=ScenarioParams)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def validate(self) -> None:
        if self.sweep_var not in SWEEP_VARS:
            raise ConfigurationError(f"unknown sweep variable {self.sweep_var!r}")
        if not self.sweep_values:
            raise ConfigurationError("sweep_values must not be empty")
        if not self.algorithms:
            raise ConfigurationError("algorithms must not be empty")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ConfigurationError(
                    f"unknown algorithm {name!r}; known: {sorted(ALGORITHMS)}")
        if self.seeds_per_point < 1:
            raise ConfigurationError("seeds_per_point must be >= 1")
        if self.master_seed < 0:
            raise ConfigurationError("master_seed must be >= 0")
        self.scenario.validate()
        self.optimizer.validate()


@dataclass
class MetricRow:
    sweep_var: str
    sweep_value: float
    algorithm: str
    seed: int
    network_energy_j: float
    local_energy_j: float
    time_support_ratio: float
    cost_support_ratio: float
    best_fitness: float
    wall_time_s: float

    def to_csv(self) -> str:
        return (f"{self.sweep_var},{self.sweep_value:g},{self.algorithm},"
                f"{self.seed},{float(self.network_energy_j)!r},"
                f"{float(self.local_energy_j)!r},"
                f"{float(self.time_support_ratio)!r},"
                f"{float(self.cost_support_ratio)!r},"
                f"{float(self.best_fitness)!r},{float(self.wall_time_s)!r}")


@dataclass
class CellResult:
    row: MetricRow
    trace: RunTrace


def support_ratios(report: EvaluationReport):
    """Fractions of MDs meeting their deadline / breach-cost budget."""
    time_ratio = float(np.mean(report.delay_violation_s == 0.0))
    cost_ratio = float(np.mean(report.cost_violation == 0.0))
    return time_ratio, cost_ratio


def apply_sweep(params: ScenarioParams, opt: OptimizerConfig, var: str, value):
    if var == "md_density":
        params = replace(params, num_md=int(value))
    elif var == "max_power_dbm":
        params = replace(params, md_max_power_w=dbm_to_watts(float(value)))
    elif var == "max_cpu_ghz":
        params = replace(params, md_cpu_hz=ghz_to_hz(float(value)))
    elif var == "solitary_V":
        opt = replace(opt, solitary_waves=int(value))
    elif var == "max_height":
        opt = replace(opt, max_height=int(value))
    elif var != "none":
        raise ConfigurationError(f"unknown sweep variable {var!r}")
    return params, opt


def cell_seeds(master_seed: int, replicate: int):
    """(scenario seed, optimizer seed) for one replicate. Independent of
    the sweep value and algorithm so comparisons are paired."""
    state = np.random.SeedSequence([int(master_seed), int(replicate)]).generate_state(2)
    return int(state[0]), int(state[1])


def _run_cell(args):
    params, opt, algorithm, sweep_var, value, replicate, master_seed = args
    params, opt = apply_sweep(params, opt, sweep_var, value)
    scenario_seed, optimizer_seed = cell_seeds(master_seed, replicate)
    scenario = build_scenario(params, scenario_seed)
    est = ALGORITHMS[algorithm](random_state=optimizer_seed,
                                **{f.name: getattr(opt, f.name)
                                   for f in fields(OptimizerConfig)})
    trace = est.fit(scenario).trace_
    time_ratio, cost_ratio = support_ratios(trace.best_report)
    row = MetricRow(
        sweep_var=sweep_var, sweep_value=float(value), algorithm=algorithm,
        seed=replicate,
        network_energy_j=trace.best_report.network_energy_j,
        local_energy_j=trace.best_report.total_local_energy_j,
        time_support_ratio=time_ratio, cost_support_ratio=cost_ratio,
        best_fitness=float(trace.best_fitness[-1]),
        wall_time_s=trace.wall_time_s)
    return CellResult(row=row, trace=trace)


def run_experiment(spec: ExperimentSpec, parallel: int = 1) -> List[CellResult]:
    """Run every (sweep value, algorithm, replicate) cell, in grid order.

    Cells are independent; `parallel` > 1 runs them on worker processes
    with identical results.
    """
    spec.validate()
    cells = [(spec.scenario, spec.optimizer, algorithm, spec.sweep_var, value,
              replicate, spec.master_seed)
             for value in spec.sweep_values
             for algorithm in spec.algorithms
             for replicate in range(spec.seeds_per_point)]
    if parallel and parallel > 1:
        with get_context("fork").Pool(parallel) as pool:
            return pool.map(_run_cell, cells)
    return [_run_cell(c) for c in cells]


def write_csv(rows: Sequence[MetricRow], path: str) -> None:
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.to_csv() + "\n")


def read_csv(path: str) -> List[MetricRow]:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ConfigurationError(f"unexpected results header in {path}")
        rows = []
        for line in fh:
            parts = line.rstrip("\n").split(",")
            rows.append(MetricRow(
                sweep_var=parts[0], sweep_value=float(parts[1]),
                algorithm=parts[2], seed=int(parts[3]),
                network_energy_j=float(parts[4]), local_energy_j=float(parts[5]),
                time_support_ratio=float(parts[6]), cost_support_ratio=float(parts[7]),
                best_fitness=float(parts[8]), wall_time_s=float(parts[9])))
    return rows


def trace_filename(sweep_var: str, value, algorithm: str, replicate: int) -> str:
    return f"trace__{sweep_var}__{value:g}__{algorithm}__s{replicate}.csv"


def wave_filename(sweep_var: str, value, algorithm: str, replicate: int) -> str:
    return f"wave__{sweep_var}__{value:g}__{algorithm}__s{replicate}.json"


def write_outputs(spec: ExperimentSpec, results: Sequence[CellResult],
                  out_dir: str, write_traces: Optional[bool] = None) -> str:
    """Write results.csv (and per-cell trace CSVs when requested) under
    out_dir; returns the results path."""
    os.makedirs(out_dir, exist_ok=True)
    results_path = os.path.join(out_dir, "results.csv")
    write_csv([r.row for r in results], results_path)
    if write_traces is None:
        write_traces = spec.emit_traces
    if write_traces:
        trace_dir = os.path.join(out_dir, "traces")
        waves_dir = os.path.join(out_dir, "waves")
        os.makedirs(trace_dir, exist_ok=True)
        os.makedirs(waves_dir, exist_ok=True)
        for r in results:
            cell = (r.row.sweep_var, r.row.sweep_value, r.row.algorithm, r.row.seed)
            with open(os.path.join(trace_dir, trace_filename(*cell)), "w") as fh:
                fh.write(r.trace.to_csv())
            if r.trace.best_wave is not None:
                with open(os.path.join(waves_dir, wave_filename(*cell)), "w") as fh:
                    fh.write(wave_to_json(r.trace.best_wave))
    return results_path


# ---------------------------------------------------------------------------
# Config files (TOML).

_SCENARIO_ALIASES = {
    "md_max_power_dbm": ("md_max_power_w", dbm_to_watts),
    "md_cpu_ghz": ("md_cpu_hz", ghz_to_hz),
    "sbs_cpu_ghz": ("sbs_cpu_hz", ghz_to_hz),
    "mbs_cpu_ghz": ("mbs_cpu_hz", ghz_to_hz),
    "task_size_kb_range": ("task_size_bits_range",
                           lambda pair: tuple(kb_to_bits(v) for v in pair)),
}


def _build_section(table: dict, cls, aliases: dict, section: str):
    known = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in table.items():
        if key in aliases:
            target, conv = aliases[key]
            kwargs[target] = conv(value)
        elif key in known:
            kwargs[key] = tuple(value) if isinstance(value, list) else value
        else:
            raise ConfigurationError(f"unknown key {key!r} in [{section}]")
    return cls(**kwargs)


def load_config(path: str) -> ExperimentSpec:
    """Parse a TOML experiment config; absent keys fall back to the
    reference defaults."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"malformed config {path}: {exc}") from exc

    for section in doc:
        if section not in ("experiment", "scenario", "optimizer"):
            raise ConfigurationError(f"unknown config section [{section}]")

    exp = dict(doc.get("experiment", {}))
    spec_kwargs = {}
    mapping = {"sweep": "sweep_var", "values": "sweep_values",
               "algorithms": "algorithms", "seeds": "seeds_per_point",
               "master_seed": "master_seed", "traces": "emit_traces"}
    for key, value in exp.items():
        if key not in mapping:
            raise ConfigurationError(f"unknown key {key!r} in [experiment]")
        target = mapping[key]
        spec_kwargs[target] = tuple(value) if isinstance(value, list) else value

    scenario = _build_section(doc.get("scenario", {}), ScenarioParams,
                              _SCENARIO_ALIASES, "scenario")
    optimizer = _build_section(doc.get("optimizer", {}), OptimizerConfig, {},
                               "optimizer")
    spec = ExperimentSpec(scenario=scenario, optimizer=optimizer, **spec_kwargs)
    spec.validate()
    return spec
