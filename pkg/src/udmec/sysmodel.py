"""Cost model for one fully-specified offloading decision.

Evaluates uplink rates (NOMA on small cells, equal-split OFDMA on the
macro cell), codec and crypto cycle costs, proportional CPU sharing at
the base stations, per-device delay/energy totals, security breach
cost, and the penalty fitness used by the optimizers.

Everything here is a pure function of (scenario, solution); matrices
are laid out (num_md, num_tasks).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import Scenario


@dataclass
class Solution:
    """Decoded decision vector (all arrays indexed [md] or [md, task]).

    assoc uses BS index 0 for the MBS and 1..J for SBSs; crypto and chan
    are 0-based indices. d1/z1 describe the first offloading hop
    (MD -> associated BS), d2/z2 the second hop (SBS -> MBS).
    """

    mu: float
    n_sub: int
    power: np.ndarray    # (I,) W
    assoc: np.ndarray    # (I,) int
    crypto: np.ndarray   # (I, K) int
    chan: np.ndarray     # (I,) int in [0, n_sub)
    z1: np.ndarray       # (I, K)
    z2: np.ndarray       # (I, K)
    d1: np.ndarray       # (I, K) bits
    d2: np.ndarray       # (I, K) bits


@dataclass
class EvaluationReport:
    delay_s: np.ndarray           # (I,)
    energy_j: np.ndarray          # (I,)
    breach_cost: np.ndarray       # (I,)
    network_energy_j: float
    total_local_energy_j: float
    delay_violation_s: np.ndarray  # (I,) max(0, delay - deadline)
    cost_violation: np.ndarray     # (I,) max(0, breach_cost - budget)
    feasible: bool


def subchannel_bandwidth(mu: float, n_sub: int, num_clusters: int,
                         system_bw_hz: float) -> float:
    """Bandwidth of one NOMA subchannel: (1 - mu) * bw / (L * N)."""
    return (1.0 - mu) * system_bw_hz / (num_clusters * n_sub)


def codec_cycles(size_bits, ratio, coeffs, xi):
    """Cycle cost of (de)compressing `size_bits` at compression ratio
    `ratio`: xi * size * (c1 * ratio**c2 + c3). Array-friendly."""
    ratio = np.asarray(ratio, dtype=float)
    if np.any(ratio <= 0):
        raise ValueError("compression ratio must be positive")
    c1, c2, c3 = coeffs
    return xi * np.asarray(size_bits, dtype=float) * (c1 * ratio ** c2 + c3)


def breach_probability(v_hat, v_bar, v_q):
    """Probability that an algorithm of level v_q fails to protect a task
    expecting level v_bar: 0 if v_q >= v_bar else 1 - exp(-v_hat*(v_bar - v_q))."""
    v_hat = np.asarray(v_hat, dtype=float)
    v_bar = np.asarray(v_bar, dtype=float)
    v_q = np.asarray(v_q, dtype=float)
    p = np.where(v_q >= v_bar, 0.0, -np.expm1(-v_hat * (v_bar - v_q)))
    return p if p.ndim else float(p)


def sbs_workload_cycles(cycles_per_bit, d1, d2, z1, z2, enc_cpb, dec_cpb,
                        comp_coeffs, decomp_coeffs, xi):
    """CPU cycles an SBS spends on one task: compute the retained part,
    decompress/compress, decrypt the first hop, encrypt the second."""
    return ((d1 - d2) * cycles_per_bit
            + codec_cycles(d1, z1, decomp_coeffs, xi)
            + codec_cycles(d2, z2, comp_coeffs, xi)
            + dec_cpb * d1 / z1
            + enc_cpb * d2 / z2)


def mbs_workload_cycles(size, ratio, cycles_per_bit, dec_cpb, decomp_coeffs, xi):
    """CPU cycles the MBS spends on one received part: compute, decrypt,
    decompress. Pass (d1, z1) for parts arriving straight from an MD and
    (d2, z2) for parts relayed by an SBS."""
    return (size * cycles_per_bit
            + dec_cpb * size / ratio
            + codec_cycles(size, ratio, decomp_coeffs, xi))


def proportional_cc_share(workloads, total_cc):
    """Split a BS's capacity over the tasks it serves, proportionally to
    their cycle workloads. Returns one share per workload entry."""
    workloads = np.asarray(workloads, dtype=float)
    if workloads.size == 0:
        raise ValueError("no served tasks to share capacity over")
    return workloads * (total_cc / workloads.sum())


def validate_solution(scenario: Scenario, sol: Solution) -> None:
    """Structural constraint check (never repairs)."""
    p = scenario.params
    i, k = scenario.num_md, scenario.num_tasks
    if not (p.eps_zero <= sol.mu <= p.eps_one):
        raise ValueError("mu out of range")
    if not (1 <= sol.n_sub <= p.max_subchannels):
        raise ValueError("n_sub out of range")
    checks = [
        (sol.power.shape == (i,) and np.all(sol.power >= p.eps_zero)
         and np.all(sol.power <= scenario.md_max_power_w), "power"),
        (sol.assoc.shape == (i,) and np.all(sol.assoc >= 0)
         and np.all(sol.assoc <= scenario.num_sbs), "assoc"),
        (sol.crypto.shape == (i, k) and np.all(sol.crypto >= 0)
         and np.all(sol.crypto < p.num_crypto), "crypto"),
        (sol.chan.shape == (i,) and np.all(sol.chan >= 0)
         and np.all(sol.chan < sol.n_sub), "chan"),
        (np.all(sol.z1 >= p.z1_min) and np.all(sol.z1 <= p.z1_max), "z1"),
        (np.all(sol.z2 >= p.z2_min) and np.all(sol.z2 <= p.z2_max), "z2"),
        (np.all(sol.d1 >= p.eps_zero) and np.all(sol.d1 <= scenario.size_bits), "d1"),
        (np.all(sol.d2 >= p.eps_zero) and np.all(sol.d2 <= sol.d1), "d2"),
    ]
    for ok, name in checks:
        if not ok:
            raise ValueError(f"solution violates structural constraint on {name}")


def uplink_rates(scenario: Scenario, sol: Solution) -> np.ndarray:
    """Per-MD uplink rate (bps) under the current association/channel map."""
    p = scenario.params
    power, gains = sol.power, scenario.gains
    sigma2 = p.noise_power_w
    rates = np.empty(scenario.num_md)

    on_mbs = sol.assoc == 0
    n_mbs = int(on_mbs.sum())
    if n_mbs:
        snr = power[on_mbs] * gains[on_mbs, 0] / sigma2
        rates[on_mbs] = (sol.mu * p.system_bandwidth_hz / n_mbs) * np.log2(1.0 + snr)

    idx = np.where(~on_mbs)[0]
    if idx.size:
        omega = subchannel_bandwidth(sol.mu, sol.n_sub, p.num_clusters,
                                     p.system_bandwidth_hz)
        serving = sol.assoc[idx]                      # SBS index 1..J
        victim_cluster = scenario.cluster_of_sbs[serving - 1]
        # Cluster of each potential interferer's serving SBS (-1 for MBS users).
        user_cluster = np.where(on_mbs, -1, scenario.cluster_of_sbs[
            np.maximum(sol.assoc, 1) - 1])
        g_at_serving = gains[:, serving]              # [u, v] = gain of u at v's SBS
        own = g_at_serving[idx, np.arange(idx.size)]
        mask = ((user_cluster[:, None] == victim_cluster[None, :])
                & (sol.chan[:, None] == sol.chan[idx][None, :])
                & (g_at_serving <= own[None, :]))
        mask[idx, np.arange(idx.size)] = False        # a user never interferes with itself
        interference = (power[:, None] * g_at_serving * mask).sum(axis=0)
        sinr = power[idx] * own / (interference + sigma2)
        rates[idx] = omega * np.log2(1.0 + sinr)
    return rates


def noma_uplink_rate(scenario: Scenario, sol: Solution, md: int) -> float:
    """Rate of one SBS-associated MD (SIC: only weaker-gain co-channel
    cluster members interfere)."""
    if sol.assoc[md] == 0:
        raise ValueError(f"MD {md} is associated with the MBS, not an SBS")
    return float(uplink_rates(scenario, sol)[md])


def mbs_uplink_rate(scenario: Scenario, sol: Solution, md: int) -> float:
    """Rate of one MBS-associated MD (equal split of the macro band)."""
    if sol.assoc[md] != 0:
        raise ValueError(f"MD {md} is associated with an SBS, not the MBS")
    return float(uplink_rates(scenario, sol)[md])


@dataclass
class CostBreakdown:
    """All intermediate matrices of one evaluation (shapes (I,) / (I, K))."""

    rates: np.ndarray
    local_time: np.ndarray
    local_energy: np.ndarray
    path_time: np.ndarray
    path_energy: np.ndarray
    sbs_share: np.ndarray   # CC assigned by the serving SBS (0 on MBS rows)
    mbs_share: np.ndarray   # CC assigned by the MBS


def compute_costs(scenario: Scenario, sol: Solution) -> CostBreakdown:
    p = scenario.params
    d, c = scenario.size_bits, scenario.cycles_per_bit
    enc_t, dec_t, cre_t, _ = scenario.crypto_tables
    enc, dec, crypt_e = enc_t[sol.crypto], dec_t[sol.crypto], cre_t[sol.crypto]
    z1, z2, d1, d2 = sol.z1, sol.z2, sol.d1, sol.d2
    xi = p.codec_xi
    s1 = d1 / z1   # compressed bits on the first hop
    s2 = d2 / z2   # compressed bits on the second hop

    l1, l2, l3 = p.md_compression_coeffs
    comp_md = xi * d1 * (l1 * z1 ** l2 + l3)
    l1, l2, l3 = p.bs_decompression_coeffs
    decomp_hop1 = xi * d1 * (l1 * z1 ** l2 + l3)
    decomp_hop2 = xi * d2 * (l1 * z2 ** l2 + l3)
    l1, l2, l3 = p.bs_compression_coeffs
    comp_sbs = xi * d2 * (l1 * z2 ** l2 + l3)

    rates = uplink_rates(scenario, sol)
    f_md = scenario.md_cpu_hz[:, None]
    air_time = s1 / rates[:, None]
    residual = (d - d1) * c

    local_time = (residual + comp_md + enc * s1) / f_md
    local_energy = (p.switched_capacitance * (residual + comp_md) * f_md ** 2
                    + sol.power[:, None] * air_time
                    + crypt_e * s1)

    on_mbs = (sol.assoc == 0)[:, None]

    # Per-task cycle workloads at the serving BSs (Eq. sense: compute +
    # decrypt + decompress of whatever that BS receives).
    a_mbs = np.where(on_mbs,
                     d1 * c + dec * s1 + decomp_hop1,
                     d2 * c + dec * s2 + decomp_hop2)
    f_hat = a_mbs * (p.mbs_cpu_hz / a_mbs.sum())

    a_sbs = (d1 - d2) * c + decomp_hop1 + comp_sbs + dec * s1 + enc * s2
    sums = np.where(on_mbs[:, 0], 0.0, a_sbs.sum(axis=1))
    denom = np.bincount(sol.assoc, weights=sums, minlength=scenario.num_sbs + 1)
    scale = p.sbs_cpu_hz / np.where(denom > 0.0, denom, 1.0)
    f_bar = a_sbs * scale[sol.assoc][:, None]
    sbs_share = np.where(on_mbs, 0.0, f_bar)

    xi_bs = p.bs_energy_per_cycle_j
    wire_time = s2 / p.backhaul_rate_bps
    t_sbs = (air_time + wire_time
             + (decomp_hop1 + comp_sbs + dec * s1 + enc * s2 + (d1 - d2) * c) / f_bar
             + (decomp_hop2 + dec * s2 + d2 * c) / f_hat)
    # Encrypt-at-SBS and decrypt-at-MBS charge the same second-hop crypto
    # energy, hence the factor 2.
    e_sbs = (p.wired_power_w * wire_time
             + xi_bs * (decomp_hop1 + comp_sbs + (d1 - d2) * c)
             + xi_bs * (decomp_hop2 + d2 * c)
             + crypt_e * (s1 + 2.0 * s2))
    t_mbs = air_time + (decomp_hop1 + d1 * c + dec * s1) / f_hat
    e_mbs = xi_bs * (decomp_hop1 + d1 * c) + crypt_e * s1

    return CostBreakdown(rates=rates, local_time=local_time,
                         local_energy=local_energy,
                         path_time=np.where(on_mbs, t_mbs, t_sbs),
                         path_energy=np.where(on_mbs, e_mbs, e_sbs),
                         sbs_share=sbs_share,
                         mbs_share=f_hat)


def local_cost(scenario: Scenario, sol: Solution, md: int, task: int):
    """(time, energy) spent at the MD itself for one task."""
    cb = compute_costs(scenario, sol)
    return float(cb.local_time[md, task]), float(cb.local_energy[md, task])


def sbs_path_cost(scenario: Scenario, sol: Solution, md: int, task: int):
    """(time, energy) of the two-hop SBS route for one task."""
    if sol.assoc[md] == 0:
        raise ValueError(f"MD {md} is associated with the MBS")
    cb = compute_costs(scenario, sol)
    return float(cb.path_time[md, task]), float(cb.path_energy[md, task])


def mbs_path_cost(scenario: Scenario, sol: Solution, md: int, task: int):
    """(time, energy) of the direct MBS route for one task."""
    if sol.assoc[md] != 0:
        raise ValueError(f"MD {md} is associated with an SBS")
    cb = compute_costs(scenario, sol)
    return float(cb.path_time[md, task]), float(cb.path_energy[md, task])


def md_totals(scenario: Scenario, sol: Solution, md: int):
    """(delay, energy) over all tasks of one MD: offload and local work
    overlap, so each task costs max(path time, local time); energies add."""
    cb = compute_costs(scenario, sol)
    delay = float(np.maximum(cb.path_time[md], cb.local_time[md]).sum())
    energy = float((cb.local_energy[md] + cb.path_energy[md]).sum())
    return delay, energy


def breach_cost(scenario: Scenario, sol: Solution) -> np.ndarray:
    """Per-MD expected financial loss from failed protection."""
    levels = scenario.crypto_tables[3][sol.crypto]
    prob = breach_probability(scenario.risk_coeff, scenario.expected_level, levels)
    return (scenario.breach_loss * prob).sum(axis=1)


def evaluate_solution(scenario: Scenario, sol: Solution,
                      check: bool = True) -> EvaluationReport:
    """Full evaluation of a structurally valid solution.

    `check=False` skips the structural validation for callers whose
    inputs are valid by construction (decode of a repaired wave)."""
    if check:
        validate_solution(scenario, sol)
    cb = compute_costs(scenario, sol)
    delay = np.maximum(cb.path_time, cb.local_time).sum(axis=1)
    energy = (cb.local_energy + cb.path_energy).sum(axis=1)
    psi = breach_cost(scenario, sol)
    delay_violation = np.maximum(0.0, delay - scenario.deadline_s)
    cost_violation = np.maximum(0.0, psi - scenario.breach_budget)
    return EvaluationReport(
        delay_s=delay,
        energy_j=energy,
        breach_cost=psi,
        network_energy_j=float(energy.sum()),
        total_local_energy_j=float(cb.local_energy.sum()),
        delay_violation_s=delay_violation,
        cost_violation=cost_violation,
        feasible=bool(np.all(delay_violation == 0.0) and np.all(cost_violation == 0.0)),
    )


def fitness(report: EvaluationReport, alpha=1e20, beta=1e20) -> float:
    """Penalty fitness (maximised): -energy - alpha*delay excess - beta*cost excess."""
    return float(-report.network_energy_j
                 - np.sum(alpha * report.delay_violation_s)
                 - np.sum(beta * report.cost_violation))


def violation_total(report: EvaluationReport) -> float:
    """Summed constraint excess, used by the lexicographic fitness mode."""
    return float(report.delay_violation_s.sum() + report.cost_violation.sum())
