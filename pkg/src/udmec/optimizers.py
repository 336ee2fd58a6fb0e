"""Optimizer suite over the wave encoding: AGWWO and its baselines.

Estimators follow the scikit-learn protocol: construct with
hyper-parameters, call `fit(scenario)`, read `best_wave_`,
`best_report_`, `best_fitness_` and `trace_`. `get_params`/`set_params`
work as usual, so sweeps compose with the wider ecosystem.

Fitness evaluation of a population batch may run on worker processes
(`n_jobs > 1`); all random draws happen in the sequential control loop,
so results are bit-identical for any worker count.
"""

from __future__ import annotations

import multiprocessing
import time
from dataclasses import dataclass, fields
from typing import Callable, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .encoding import Bounds, Wave, decode_wave, init_wave, repair_wave
from .operators import (break_wave, breaking_coefficient, crossover,
                        crossover_probability, diversity_mutation_probability,
                        mutate_wave, mutation_probability,
                        population_diversity, refract_wave, tournament_select)
from .scenario import ConfigurationError, Scenario
from .sysmodel import (EvaluationReport, evaluate_solution, fitness,
                       violation_total)


@dataclass(frozen=True)
class OptimizerConfig:
    """Shared knob set for the whole suite (each algorithm reads the
    subset it uses)."""

    population_size: int = 20
    iterations: int = 200
    solitary_waves: int = 6
    max_height: int = 5
    a1: float = 0.8          # adaptive crossover slope / ceiling
    a2: float = 0.8
    a3: float = 0.3          # adaptive mutation slope / floor band
    a4: float = 0.3
    a5: float = 0.6          # diversity-guided mutation bands
    a6: float = 0.03
    a7: float = 1e-5
    diversity_low: float = 0.01
    diversity_high: float = 0.25
    u_min: float = 0.001     # breaking radius ramp
    u_max: float = 0.25
    alpha: float = 1e20      # delay-violation penalty
    beta: float = 1e20       # breach-cost-violation penalty
    wavelength_init: float = 0.5     # classic-WWO propagation
    wavelength_base: float = 1.0026
    wavelength_eps: float = 1e-31
    fitness_mode: str = "penalty"    # or "lexicographic"

    def validate(self) -> None:
        if self.population_size < 1 or self.solitary_waves < 1 or self.max_height < 1:
            raise ConfigurationError("population_size, solitary_waves and max_height must be >= 1")
        if self.iterations < 0:
            raise ConfigurationError("iterations must be >= 0")
        if not (0 <= self.a1 <= self.a2 <= 1):
            raise ConfigurationError("need 0 <= a1 <= a2 <= 1")
        if not (0 <= self.a3 <= self.a4 <= 1):
            raise ConfigurationError("need 0 <= a3 <= a4 <= 1")
        # Zero diversity-mutation rates are admitted (plain adaptive GA).
        if not (0 <= self.a6 <= self.a5 < 1):
            raise ConfigurationError("need 0 <= a6 <= a5 < 1")
        if not (0 <= self.a7 < 1):
            raise ConfigurationError("need 0 <= a7 < 1")
        if not (0 < self.diversity_low < self.diversity_high < 1):
            raise ConfigurationError("need 0 < diversity_low < diversity_high < 1")
        if not (0 < self.u_min < self.u_max):
            raise ConfigurationError("need 0 < u_min < u_max")
        if self.alpha < 0 or self.beta < 0:
            raise ConfigurationError("penalty factors must be >= 0")
        if self.fitness_mode not in ("penalty", "lexicographic"):
            raise ConfigurationError(f"unknown fitness_mode {self.fitness_mode!r}")


@dataclass
class RunTrace:
    """Per-iteration series (index 0 = state right after initialisation)
    plus the final best solution."""

    algorithm: str
    best_fitness: np.ndarray
    avg_fitness: np.ndarray
    best_energy: np.ndarray
    diversity: np.ndarray
    best_wave: Optional[Wave]
    best_report: EvaluationReport
    wall_time_s: float = 0.0

    def to_csv(self) -> str:
        lines = ["iteration,best_fitness,avg_fitness,best_energy,diversity"]
        for t in range(len(self.best_fitness)):
            lines.append(f"{t},{float(self.best_fitness[t])!r},"
                         f"{float(self.avg_fitness[t])!r},"
                         f"{float(self.best_energy[t])!r},"
                         f"{float(self.diversity[t])!r}")
        return "\n".join(lines) + "\n"


def check_scenario(scenario: Scenario) -> Scenario:
    if not isinstance(scenario, Scenario):
        raise TypeError(f"expected a Scenario, got {type(scenario).__name__}")
    scenario.params.validate()
    return scenario


# ---------------------------------------------------------------------------
# Batched fitness evaluation (optionally on worker processes).

_WORKER_STATE = None


def _worker_init(scenario, alpha, beta, quantizer):
    global _WORKER_STATE
    _WORKER_STATE = (scenario, alpha, beta, quantizer)


def _eval_payload(payload):
    scenario, alpha, beta, quantizer = _WORKER_STATE
    wave = Wave(*payload)
    return _evaluate_wave(wave, scenario, alpha, beta, quantizer)


def _evaluate_wave(wave, scenario, alpha, beta, quantizer):
    sol = decode_wave(wave, scenario)
    if quantizer is not None:
        sol = quantizer(sol)
    # Decoded repaired waves are structurally valid by construction.
    report = evaluate_solution(scenario, sol, check=False)
    return fitness(report, alpha, beta), report


class _Evaluator:
    """Maps waves to (fitness, report) pairs, preserving order."""

    def __init__(self, scenario, alpha, beta, quantizer=None, n_jobs=1):
        self.scenario = scenario
        self.alpha = alpha
        self.beta = beta
        self.quantizer = quantizer
        self.n_evaluations = 0
        self._pool = None
        if n_jobs and n_jobs > 1:
            ctx = multiprocessing.get_context("fork")
            self._pool = ctx.Pool(n_jobs, initializer=_worker_init,
                                  initargs=(scenario, alpha, beta, quantizer))

    def __call__(self, waves: Sequence[Wave]):
        self.n_evaluations += len(waves)
        if self._pool is not None:
            payloads = [(w.mu, w.n_sub, w.power, w.bs, w.crypto, w.z1, w.z2,
                         w.chan, w.d1, w.d2, w.height) for w in waves]
            return self._pool.map(_eval_payload, payloads)
        return [_evaluate_wave(w, self.scenario, self.alpha, self.beta,
                               self.quantizer) for w in waves]

    def close(self):
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None


def _spawn_streams(seed, names):
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(child) for name, child in zip(names, children)}


def _make_key(cfg: OptimizerConfig):
    """Comparison key for best/replacement decisions. The default is the
    penalty fitness itself; the lexicographic mode ranks by (violation,
    energy) and avoids the float-resolution loss of huge penalties."""
    if cfg.fitness_mode == "lexicographic":
        return lambda fit, rep: (-violation_total(rep), -rep.network_energy_j)
    return lambda fit, rep: fit


# ---------------------------------------------------------------------------
# Estimators.


class BaseWaveOptimizer(BaseEstimator):
    """Common parameter surface and fit() plumbing for the suite."""

    algorithm = "base"

    def __init__(self, population_size=20, iterations=200, solitary_waves=6,
                 max_height=5, a1=0.8, a2=0.8, a3=0.3, a4=0.3, a5=0.6,
                 a6=0.03, a7=1e-5, diversity_low=0.01, diversity_high=0.25,
                 u_min=0.001, u_max=0.25, alpha=1e20, beta=1e20,
                 wavelength_init=0.5, wavelength_base=1.0026,
                 wavelength_eps=1e-31, fitness_mode="penalty",
                 quantizer: Optional[Callable] = None, n_jobs=1,
                 random_state=None):
        self.population_size = population_size
        self.iterations = iterations
        self.solitary_waves = solitary_waves
        self.max_height = max_height
        self.a1 = a1
        self.a2 = a2
        self.a3 = a3
        self.a4 = a4
        self.a5 = a5
        self.a6 = a6
        self.a7 = a7
        self.diversity_low = diversity_low
        self.diversity_high = diversity_high
        self.u_min = u_min
        self.u_max = u_max
        self.alpha = alpha
        self.beta = beta
        self.wavelength_init = wavelength_init
        self.wavelength_base = wavelength_base
        self.wavelength_eps = wavelength_eps
        self.fitness_mode = fitness_mode
        self.quantizer = quantizer
        self.n_jobs = n_jobs
        self.random_state = random_state

    def config(self) -> OptimizerConfig:
        kwargs = {f.name: getattr(self, f.name) for f in fields(OptimizerConfig)}
        cfg = OptimizerConfig(**kwargs)
        cfg.validate()
        return cfg

    def fit(self, scenario: Scenario, y=None):
        scenario = check_scenario(scenario)
        cfg = self.config()
        evaluator = _Evaluator(scenario, cfg.alpha, cfg.beta,
                               quantizer=self.quantizer, n_jobs=self.n_jobs)
        start = time.perf_counter()
        try:
            trace = self._run(scenario, cfg, evaluator)
        finally:
            evaluator.close()
        trace.wall_time_s = time.perf_counter() - start
        self.trace_ = trace
        self.best_wave_ = trace.best_wave
        self.best_report_ = trace.best_report
        self.best_fitness_ = float(trace.best_fitness[-1])
        self.n_evaluations_ = evaluator.n_evaluations
        return self

    def score(self, scenario=None, y=None) -> float:
        return self.best_fitness_

    def _run(self, scenario, cfg, evaluator) -> RunTrace:
        raise NotImplementedError


class _Population:
    """Bookkeeping shared by the iterative optimizers."""

    def __init__(self, waves, evals, key):
        self.waves = list(waves)
        self.fits = np.array([e[0] for e in evals])
        self.reports = [e[1] for e in evals]
        self.keys = [key(f, r) for f, r in evals]
        best = max(range(len(self.waves)), key=lambda m: self.keys[m])
        self.best_wave = self.waves[best].copy()
        self.best_fit = float(self.fits[best])
        self.best_report = self.reports[best]
        self.best_key = self.keys[best]

    def replace(self, m, wave, fit, report, key_value):
        self.waves[m] = wave
        self.fits[m] = fit
        self.reports[m] = report
        self.keys[m] = key_value

    def maybe_update_best(self, wave, fit, report, key_value) -> bool:
        if key_value > self.best_key:
            self.best_wave = wave.copy()
            self.best_fit = float(fit)
            self.best_report = report
            self.best_key = key_value
            return True
        return False

    def refresh_best(self):
        best = max(range(len(self.waves)), key=lambda m: self.keys[m])
        self.maybe_update_best(self.waves[best], self.fits[best],
                               self.reports[best], self.keys[best])


class _TraceBuilder:
    def __init__(self, algorithm):
        self.algorithm = algorithm
        self.rows = []

    def add(self, pop: _Population, diversity: float):
        self.rows.append((pop.best_fit, float(pop.fits.mean()),
                          pop.best_report.network_energy_j, diversity))

    def build(self, pop: _Population) -> RunTrace:
        arr = np.array(self.rows, dtype=float)
        return RunTrace(algorithm=self.algorithm,
                        best_fitness=arr[:, 0], avg_fitness=arr[:, 1],
                        best_energy=arr[:, 2], diversity=arr[:, 3],
                        best_wave=pop.best_wave, best_report=pop.best_report)


def _break_and_adopt(pop, m, wave, fit, report, key_value, bounds, cfg, u,
                     evaluator, rng, key, height):
    """New wave beats the best seen so far: probe around it with solitary
    waves, adopt the best probe on strict improvement, then install the
    winner both at slot m and as the tracked best."""
    solitary = [break_wave(wave, bounds, u, rng) for _ in range(cfg.solitary_waves)]
    evals = evaluator(solitary)
    best = max(range(len(solitary)), key=lambda v: key(*evals[v]))
    if key(*evals[best]) > key_value:
        wave = solitary[best]
        fit, report = evals[best]
        key_value = key(fit, report)
    wave.height = height
    pop.replace(m, wave, fit, report, key_value)
    pop.maybe_update_best(wave, fit, report, key_value)


class AGWWO(BaseWaveOptimizer):
    """Water-wave search whose propagation step is replaced by genetic
    operations (tournament selection with elitism, diversity-guided
    mutation, adaptive crossover and mutation); refraction restarts
    stagnant waves toward the best one and breaking fine-tunes new
    record holders."""

    algorithm = "agwwo"

    def _run(self, scenario, cfg, evaluator):
        bounds = Bounds.from_scenario(scenario)
        key = _make_key(cfg)
        streams = _spawn_streams(self.random_state, (
            "init", "selection", "diversity", "crossover", "mutation",
            "refraction", "breaking"))
        waves = [init_wave(bounds, streams["init"], cfg.max_height)
                 for _ in range(cfg.population_size)]
        pop = _Population(waves, evaluator(waves), key)
        trace = _TraceBuilder(self.algorithm)
        trace.add(pop, population_diversity(pop.waves, bounds))

        m_all = range(cfg.population_size)
        for t in range(1, cfg.iterations + 1):
            cand = tournament_select(pop.waves, pop.fits, pop.best_wave,
                                     streams["selection"])
            diversity = population_diversity(cand, bounds)
            p_div = diversity_mutation_probability(
                diversity, cfg.a5, cfg.a6, cfg.a7,
                cfg.diversity_low, cfg.diversity_high)
            for w in cand:
                mutate_wave(w, p_div, bounds, streams["diversity"])
            stage = evaluator(cand)
            f = np.array([e[0] for e in stage])
            f_min, f_ave, f_max = f.min(), f.mean(), f.max()
            for m in range(0, cfg.population_size - 1, 2):
                pc = crossover_probability(min(f[m], f[m + 1]), f_min, f_ave,
                                           cfg.a1, cfg.a2)
                crossover(cand[m], cand[m + 1], pc, bounds, streams["crossover"])
            for m in m_all:
                pm = mutation_probability(f[m], f_max, f_ave, cfg.a3, cfg.a4)
                mutate_wave(cand[m], pm, bounds, streams["mutation"])
            new_evals = evaluator(cand)

            u = breaking_coefficient(t, cfg.iterations, cfg.u_min, cfg.u_max)
            refracted = []
            for m in m_all:
                new_fit, new_report = new_evals[m]
                new_key = key(new_fit, new_report)
                if new_key > pop.keys[m]:
                    # The slot keeps its stagnation counter; heights change
                    # only on failed updates and after refraction.
                    slot_height = pop.waves[m].height
                    if new_key > pop.best_key:
                        _break_and_adopt(pop, m, cand[m], new_fit, new_report,
                                         new_key, bounds, cfg, u, evaluator,
                                         streams["breaking"], key, slot_height)
                    else:
                        cand[m].height = slot_height
                        pop.replace(m, cand[m], new_fit, new_report, new_key)
                else:
                    pop.waves[m].height -= 1
                    if pop.waves[m].height <= 0:
                        fresh = refract_wave(pop.waves[m], pop.best_wave,
                                             bounds, streams["refraction"])
                        fresh.height = cfg.max_height
                        pop.waves[m] = fresh
                        refracted.append(m)
            if refracted:
                for m, (fit, report) in zip(refracted,
                                            evaluator([pop.waves[m] for m in refracted])):
                    pop.replace(m, pop.waves[m], fit, report, key(fit, report))
            pop.refresh_best()
            trace.add(pop, diversity)
        return trace.build(pop)


class AGA(BaseWaveOptimizer):
    """The genetic propagation block alone (selection, diversity-guided
    mutation, adaptive crossover/mutation, elitist replacement): no
    heights, refraction or breaking."""

    algorithm = "aga"

    def _run(self, scenario, cfg, evaluator):
        bounds = Bounds.from_scenario(scenario)
        key = _make_key(cfg)
        streams = _spawn_streams(self.random_state, (
            "init", "selection", "diversity", "crossover", "mutation"))
        waves = [init_wave(bounds, streams["init"], cfg.max_height)
                 for _ in range(cfg.population_size)]
        pop = _Population(waves, evaluator(waves), key)
        trace = _TraceBuilder(self.algorithm)
        trace.add(pop, population_diversity(pop.waves, bounds))

        for _ in range(1, cfg.iterations + 1):
            cand = tournament_select(pop.waves, pop.fits, pop.best_wave,
                                     streams["selection"])
            diversity = population_diversity(cand, bounds)
            p_div = diversity_mutation_probability(
                diversity, cfg.a5, cfg.a6, cfg.a7,
                cfg.diversity_low, cfg.diversity_high)
            for w in cand:
                mutate_wave(w, p_div, bounds, streams["diversity"])
            stage = evaluator(cand)
            f = np.array([e[0] for e in stage])
            f_min, f_ave, f_max = f.min(), f.mean(), f.max()
            for m in range(0, cfg.population_size - 1, 2):
                pc = crossover_probability(min(f[m], f[m + 1]), f_min, f_ave,
                                           cfg.a1, cfg.a2)
                crossover(cand[m], cand[m + 1], pc, bounds, streams["crossover"])
            for m in range(cfg.population_size):
                pm = mutation_probability(f[m], f_max, f_ave, cfg.a3, cfg.a4)
                mutate_wave(cand[m], pm, bounds, streams["mutation"])
            new_evals = evaluator(cand)
            for m, (fit, report) in enumerate(new_evals):
                new_key = key(fit, report)
                if new_key > pop.keys[m]:
                    pop.replace(m, cand[m], fit, report, new_key)
                    pop.maybe_update_best(cand[m], fit, report, new_key)
            pop.refresh_best()
            trace.add(pop, diversity)
        return trace.build(pop)


class WWO(BaseWaveOptimizer):
    """Classic water-wave optimization: per-dimension propagation with a
    per-wave wavelength shrunk by fitness rank, plus the same refraction
    and breaking operators as AGWWO."""

    algorithm = "wwo"

    def _run(self, scenario, cfg, evaluator):
        bounds = Bounds.from_scenario(scenario)
        key = _make_key(cfg)
        streams = _spawn_streams(self.random_state, (
            "init", "propagation", "refraction", "breaking"))
        waves = [init_wave(bounds, streams["init"], cfg.max_height)
                 for _ in range(cfg.population_size)]
        pop = _Population(waves, evaluator(waves), key)
        trace = _TraceBuilder(self.algorithm)
        trace.add(pop, population_diversity(pop.waves, bounds))
        lambdas = np.full(cfg.population_size, cfg.wavelength_init)

        for t in range(1, cfg.iterations + 1):
            cand = [self._propagate(w, lambdas[m], bounds, streams["propagation"])
                    for m, w in enumerate(pop.waves)]
            new_evals = evaluator(cand)
            u = breaking_coefficient(t, cfg.iterations, cfg.u_min, cfg.u_max)
            refracted = []
            for m, (fit, report) in enumerate(new_evals):
                new_key = key(fit, report)
                if new_key > pop.keys[m]:
                    # Classic rule: an improved wave starts fresh at h_max.
                    if new_key > pop.best_key:
                        _break_and_adopt(pop, m, cand[m], fit, report, new_key,
                                         bounds, cfg, u, evaluator,
                                         streams["breaking"], key,
                                         cfg.max_height)
                    else:
                        cand[m].height = cfg.max_height
                        pop.replace(m, cand[m], fit, report, new_key)
                else:
                    pop.waves[m].height -= 1
                    if pop.waves[m].height <= 0:
                        fresh = refract_wave(pop.waves[m], pop.best_wave,
                                             bounds, streams["refraction"])
                        fresh.height = cfg.max_height
                        pop.waves[m] = fresh
                        refracted.append(m)
            if refracted:
                for m, (fit, report) in zip(refracted,
                                            evaluator([pop.waves[m] for m in refracted])):
                    pop.replace(m, pop.waves[m], fit, report, key(fit, report))
            pop.refresh_best()
            # Fitness-ranked wavelength reduction: better waves search finer.
            f = pop.fits
            spread = f.max() - f.min() + cfg.wavelength_eps
            lambdas = lambdas * cfg.wavelength_base ** (
                -(f - f.min() + cfg.wavelength_eps) / spread)
            trace.add(pop, population_diversity(pop.waves, bounds))
        return trace.build(pop)

    @staticmethod
    def _propagate(wave, lam, bounds, rng):
        out = wave.copy()
        for group in ("mu", "n_sub", "bs", "crypto", "power", "z1", "z2",
                      "chan", "d1", "d2"):
            v = out.get(group)
            step = rng.uniform(-1.0, 1.0, size=v.size) * lam * bounds.widths(group)
            new = v + step
            if group in ("n_sub", "bs", "crypto", "chan"):
                new = np.rint(new)
            out.set(group, new)
        return repair_wave(out, bounds)


class CMT(BaseWaveOptimizer):
    """No-search baseline: every task is executed locally at full MD
    speed; nothing is offloaded, compressed or encrypted."""

    algorithm = "cmt"

    def _run(self, scenario, cfg, evaluator):
        work = (scenario.size_bits * scenario.cycles_per_bit).sum(axis=1)
        delay = work / scenario.md_cpu_hz
        energy = (scenario.params.switched_capacitance * work
                  * scenario.md_cpu_hz ** 2)
        zeros = np.zeros(scenario.num_md)
        delay_violation = np.maximum(0.0, delay - scenario.deadline_s)
        report = EvaluationReport(
            delay_s=delay, energy_j=energy, breach_cost=zeros,
            network_energy_j=float(energy.sum()),
            total_local_energy_j=float(energy.sum()),
            delay_violation_s=delay_violation, cost_violation=zeros.copy(),
            feasible=bool(np.all(delay_violation == 0.0)))
        fit = fitness(report, cfg.alpha, cfg.beta)
        bounds = Bounds.from_scenario(scenario)
        wave = repair_wave(Wave(
            mu=0.5, n_sub=1.0,
            power=np.zeros(scenario.num_md),
            bs=np.ones(scenario.num_md),
            crypto=np.full(bounds.d_task.size, bounds.num_crypto, dtype=float),
            z1=np.full(bounds.d_task.size, bounds.z1_min),
            z2=np.full(bounds.d_task.size, bounds.z2_min),
            chan=np.ones(scenario.num_md),
            d1=np.zeros(bounds.d_task.size),
            d2=np.zeros(bounds.d_task.size),
            height=cfg.max_height), bounds)
        one = np.array([fit])
        return RunTrace(algorithm=self.algorithm, best_fitness=one,
                        avg_fitness=one.copy(),
                        best_energy=np.array([report.network_energy_j]),
                        diversity=np.array([0.0]),
                        best_wave=wave, best_report=report)


ALGORITHMS = {"agwwo": AGWWO, "aga": AGA, "wwo": WWO, "cmt": CMT}


def _run_with(cls, scenario, config: Optional[OptimizerConfig], seed, n_jobs=1) -> RunTrace:
    kwargs = {}
    if config is not None:
        kwargs = {f.name: getattr(config, f.name) for f in fields(OptimizerConfig)}
    est = cls(random_state=seed, n_jobs=n_jobs, **kwargs)
    return est.fit(scenario).trace_


def run_agwwo(scenario, config=None, seed=None, n_jobs=1) -> RunTrace:
    return _run_with(AGWWO, scenario, config, seed, n_jobs)


def run_aga(scenario, config=None, seed=None, n_jobs=1) -> RunTrace:
    return _run_with(AGA, scenario, config, seed, n_jobs)


def run_wwo(scenario, config=None, seed=None, n_jobs=1) -> RunTrace:
    return _run_with(WWO, scenario, config, seed, n_jobs)


def run_cmt(scenario, config=None, seed=None, n_jobs=1) -> RunTrace:
    return _run_with(CMT, scenario, config, seed, n_jobs)
