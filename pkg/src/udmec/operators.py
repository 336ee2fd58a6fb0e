"""Search operators shared by the wave/genetic optimizers.

All operators take explicit RNG streams and never evaluate fitness;
the optimizer loops own evaluation and bookkeeping.
"""

from __future__ import annotations

from typing import List, Sequence

import numpy as np

from .encoding import (GROUPS, INTEGER_GROUPS, SCALAR_GROUPS, Bounds, Wave,
                       repair_wave)


def tournament_select(population: Sequence[Wave], fitnesses: np.ndarray,
                      historical_best: Wave, rng: np.random.Generator) -> List[Wave]:
    """Binary tournaments producing a same-sized population of copies.

    If the historical best genome was not drawn into the next
    generation, it replaces the selected individual with the lowest
    fitness.
    """
    m = len(population)
    draws = rng.integers(0, m, size=(m, 2))
    winners = np.where(fitnesses[draws[:, 0]] >= fitnesses[draws[:, 1]],
                       draws[:, 0], draws[:, 1])
    selected = [population[w].copy() for w in winners]
    if not any(w.genes_equal(historical_best) for w in selected):
        worst = int(np.argmin(fitnesses[winners]))
        selected[worst] = historical_best.copy()
    return selected


def crossover_probability(f_pair_min: float, f_min: float, f_ave: float,
                          a1: float, a2: float) -> float:
    """Adaptive crossover probability: weak pairs cross less, pairs at or
    above the population average cross with a2."""
    if f_pair_min >= f_ave or f_ave == f_min:
        return a2
    return a1 * (f_pair_min - f_min) / (f_ave - f_min)


def mutation_probability(f_m: float, f_max: float, f_ave: float,
                         a3: float, a4: float) -> float:
    """Adaptive mutation probability: the best individual mutates least,
    below-average individuals mutate with a4."""
    if f_m < f_ave:
        return a4
    if f_max == f_ave:
        return a3
    return a3 * (f_max - f_m) / (f_max - f_ave)


def crossover(wave_a: Wave, wave_b: Wave, probability: float, bounds: Bounds,
              rng: np.random.Generator):
    """With `probability`, swap a uniform segment of one uniformly chosen
    gene group between the pair; both outputs are repaired."""
    if rng.uniform() >= probability:
        return wave_a, wave_b
    group = GROUPS[int(rng.integers(0, len(GROUPS)))]
    va, vb = wave_a.get(group).copy(), wave_b.get(group).copy()
    n = va.size
    start = int(rng.integers(0, n))
    stop = int(rng.integers(start, n)) + 1
    va[start:stop], vb[start:stop] = vb[start:stop].copy(), va[start:stop].copy()
    wave_a.set(group, va)
    wave_b.set(group, vb)
    return repair_wave(wave_a, bounds), repair_wave(wave_b, bounds)


def mutate_gene(group: str, value: float, lo: float, hi: float,
                r1: float, r2: float) -> float:
    """One gene update: pull toward hi when r2 > 0.5, else toward lo,
    with magnitude r1. Integer groups are rounded (caller repairs)."""
    anchor = hi if r2 > 0.5 else lo
    out = r1 * anchor + (1.0 - r1) * value
    if group in INTEGER_GROUPS:
        out = float(np.rint(out))
    return float(out)


def mutate_wave(wave: Wave, probability: float, bounds: Bounds,
                rng: np.random.Generator) -> Wave:
    """Apply the per-group mutation rules to each gene independently with
    the given probability. Groups are updated in canonical order so the
    channel cap uses the mutated subchannel count and the second-hop cap
    the mutated first-hop sizes. One batched draw per wave keeps the
    stream layout fixed regardless of what fires."""
    draws = rng.uniform(size=(3, bounds.total_genes))
    pos = 0
    for group in GROUPS:
        n = bounds.group_size(group)
        fire = draws[0, pos:pos + n] < probability
        r1 = draws[1, pos:pos + n]
        r2 = draws[2, pos:pos + n]
        pos += n
        if not fire.any():
            continue
        lo = bounds.mutation_lo(group)
        hi = bounds.mutation_hi(group, wave)
        if group in SCALAR_GROUPS:
            value = getattr(wave, group)
            anchor = hi if r2[0] > 0.5 else lo
            out = r1[0] * anchor + (1.0 - r1[0]) * value
            setattr(wave, group, float(np.rint(out)) if group in INTEGER_GROUPS
                    else float(out))
            continue
        values = getattr(wave, group)
        anchor = np.where(r2 > 0.5, hi, lo)
        out = r1 * anchor + (1.0 - r1) * values
        if group in INTEGER_GROUPS:
            out = np.rint(out)
        setattr(wave, group, np.where(fire, out, values))
    return repair_wave(wave, bounds)


def population_diversity(population: Sequence[Wave], bounds: Bounds) -> float:
    """Mean normalised per-group spread around the population centroid;
    always inside [0, 1]."""
    m = len(population)
    total = 0.0
    for group in GROUPS:
        stack = np.stack([w.get(group) for w in population])  # (M, n)
        mean = stack.mean(axis=0)
        dev = np.sqrt(((stack - mean) ** 2).sum(axis=1))      # (M,)
        total += dev.sum() / bounds.diagonal(group)
    return total / (10.0 * m)


def diversity_mutation_probability(diversity: float, a5: float, a6: float,
                                   a7: float, d1: float, d2: float) -> float:
    """Three-band schedule: strong mutation when the population has
    collapsed, mild in the middle band, negligible when spread out."""
    if diversity < d1:
        return a5
    if diversity < d2:
        return a6
    return a7


def refract_gene(value: float, best_value: float, integer: bool,
                 rng: np.random.Generator) -> float:
    """Draw around the midpoint toward the best value; the spread shrinks
    with the remaining gap, so repeated refraction converges onto it."""
    out = rng.normal((best_value + value) / 2.0, abs(best_value - value) / 2.0)
    if integer:
        out = float(np.rint(out))
    return float(out)


def refract_wave(wave: Wave, best: Wave, bounds: Bounds,
                 rng: np.random.Generator) -> Wave:
    """Refract every gene of `wave` toward `best` (fresh wave returned)."""
    out = wave.copy()
    for group in GROUPS:
        v = out.get(group)
        b = best.get(group)
        new = rng.normal((b + v) / 2.0, np.abs(b - v) / 2.0)
        if group in INTEGER_GROUPS:
            new = np.rint(new)
        out.set(group, new)
    return repair_wave(out, bounds)


def breaking_coefficient(t: int, total: int, u_min: float, u_max: float) -> float:
    """Linear ramp of the breaking radius from u_min (t=1) to u_max (t=T);
    written so that both endpoints are exact."""
    s = (t - 1) / max(total - 1, 1)
    return u_min * (1.0 - s) + u_max * s


def break_gene(best_value: float, range_width: float, zeta: float, u: float,
               integer: bool) -> float:
    """One solitary-wave gene: the best value plus a normal perturbation
    scaled by u and the gene's feasible range."""
    out = best_value + zeta * u * range_width
    if integer:
        out = float(np.rint(out))
    return float(out)


def break_wave(best: Wave, bounds: Bounds, u: float,
               rng: np.random.Generator) -> Wave:
    """One solitary wave around `best`, with a fresh standard-normal draw
    per gene. The channel radius uses the already-perturbed subchannel
    count and the second-hop radius the perturbed first-hop sizes."""
    out = best.copy()

    def perturb(group, width):
        v = out.get(group)
        zeta = rng.standard_normal(v.size)
        new = v + zeta * u * np.broadcast_to(np.asarray(width, dtype=float), (v.size,))
        if group in INTEGER_GROUPS:
            new = np.rint(new)
        out.set(group, new)

    e0 = bounds.eps_zero
    perturb("mu", bounds.eps_one - e0)
    perturb("n_sub", bounds.n_max - 1)
    out.n_sub = float(np.clip(out.n_sub, 1, bounds.n_max))
    perturb("bs", bounds.num_bs - 1)
    perturb("crypto", bounds.num_crypto - 1)
    perturb("power", bounds.p_max - e0)
    perturb("z1", bounds.z1_max - bounds.z1_min)
    perturb("z2", bounds.z2_max - bounds.z2_min)
    perturb("chan", out.n_sub - 1)
    perturb("d1", bounds.d_task)
    out.d1 = np.clip(out.d1, e0, bounds.d_task)
    perturb("d2", out.d1)
    return repair_wave(out, bounds)
