import math

import numpy as np
import pytest

from udmec.sysmodel import (EvaluationReport, Solution, breach_cost,
                            breach_probability, codec_cycles, compute_costs,
                            evaluate_solution, fitness, local_cost,
                            mbs_path_cost, mbs_uplink_rate, mbs_workload_cycles,
                            md_totals, noma_uplink_rate, proportional_cc_share,
                            sbs_path_cost, sbs_workload_cycles,
                            subchannel_bandwidth)

from conftest import random_solution, toy_scenario
from naive_model import naive_evaluate

LAM_LOC = (1.027e-15, 32.28, 0.3)
LAM_COMP_BS = (0.076, 0.7116, 0.5794)
LAM_DECOMP_BS = (0.115, -0.9179, 0.046)


def two_md_scenario(g1=2e-11, g2=1e-11):
    """Two MDs, one SBS; controlled gains at the SBS column."""
    return toy_scenario(gains=[[1e-11, g1], [1e-11, g2]])


def solution_for(scenario, assoc, chan=(0, 0), power=(0.1, 0.1), mu=0.5,
                 n_sub=2, d1=8e5, d2=4e5, z1=2.5, z2=5.0, crypto=0):
    i, k = scenario.num_md, scenario.num_tasks
    return Solution(
        mu=mu, n_sub=n_sub,
        power=np.asarray(power, dtype=float),
        assoc=np.asarray(assoc, dtype=np.int64),
        crypto=np.full((i, k), crypto, dtype=np.int64),
        chan=np.asarray(chan, dtype=np.int64),
        z1=np.full((i, k), z1), z2=np.full((i, k), z2),
        d1=np.full((i, k), d1), d2=np.full((i, k), d2),
    )


class TestSubchannelBandwidth:
    def test_reference_point(self):
        assert subchannel_bandwidth(0.5, 5, 6, 20e6) == pytest.approx(1e7 / 30, rel=1e-12)

    def test_single_shared_subchannel(self):
        assert subchannel_bandwidth(0.5, 1, 1, 20e6) == pytest.approx(1e7, rel=1e-12)

    def test_positive_near_upper_mu(self):
        assert subchannel_bandwidth(1 - 1e-6, 5, 6, 20e6) > 0


class TestRates:
    def test_interference_free_matches_closed_form(self):
        s = two_md_scenario()
        sol = solution_for(s, assoc=(1, 1), chan=(0, 1))  # different channels
        omega = subchannel_bandwidth(0.5, 2, 1, 20e6)
        for i in (0, 1):
            expected = omega * math.log2(1 + sol.power[i] * s.gains[i, 1] / 1e-14)
            assert noma_uplink_rate(s, sol, i) == pytest.approx(expected, rel=1e-12)

    def test_two_md_sic_ordering(self):
        s = two_md_scenario(g1=2e-11, g2=1e-11)
        sol = solution_for(s, assoc=(1, 1), chan=(0, 0), power=(0.10, 0.15))
        omega = subchannel_bandwidth(0.5, 2, 1, 20e6)
        # Weaker-gain MD 1 decodes last: no interference.
        r2 = omega * math.log2(1 + 0.15 * 1e-11 / 1e-14)
        assert noma_uplink_rate(s, sol, 1) == pytest.approx(r2, rel=1e-12)
        # Stronger-gain MD 0 sees MD 1's power as interference.
        r1 = omega * math.log2(1 + 0.10 * 2e-11 / (0.15 * 1e-11 + 1e-14))
        assert noma_uplink_rate(s, sol, 0) == pytest.approx(r1, rel=1e-12)

    def test_rate_nonincreasing_in_interferer_power(self):
        s = two_md_scenario()
        prev = np.inf
        for p2 in np.linspace(0.01, 0.2, 8):
            sol = solution_for(s, assoc=(1, 1), chan=(0, 0), power=(0.1, p2))
            r = noma_uplink_rate(s, sol, 0)
            assert r <= prev + 1e-12
            prev = r

    def test_mbs_equal_split(self):
        s = two_md_scenario()
        solo = solution_for(s, assoc=(0, 1))
        both = solution_for(s, assoc=(0, 0))
        r_solo = mbs_uplink_rate(s, solo, 0)
        expected = 0.5 * 20e6 * math.log2(1 + 0.1 * 1e-11 / 1e-14)
        assert r_solo == pytest.approx(expected, rel=1e-12)
        assert mbs_uplink_rate(s, both, 0) == pytest.approx(r_solo / 2, rel=1e-12)

    def test_mbs_rate_ignores_channel_gene(self):
        s = two_md_scenario()
        a = solution_for(s, assoc=(0, 0), chan=(0, 0))
        b = solution_for(s, assoc=(0, 0), chan=(1, 0))
        assert mbs_uplink_rate(s, a, 0) == mbs_uplink_rate(s, b, 0)

    def test_contract_violations(self):
        s = two_md_scenario()
        sol = solution_for(s, assoc=(0, 1))
        with pytest.raises(ValueError):
            noma_uplink_rate(s, sol, 0)
        with pytest.raises(ValueError):
            mbs_uplink_rate(s, sol, 1)


class TestCodecCycles:
    def test_zero_data(self):
        assert codec_cycles(0.0, 2.5, LAM_LOC, 50.0) == 0.0

    def test_pinned_md_compression(self):
        # 50 * 8e5 * (1.027e-15 * 2.3**32.28 + 0.3), frozen via mpmath at 40 digits
        assert codec_cycles(8e5, 2.3, LAM_LOC, 50.0) == pytest.approx(
            12019507.651192844, rel=1e-12)

    def test_decompression_monotone_decreasing_in_ratio(self):
        z = np.linspace(3.4, 11.2, 30)
        cycles = codec_cycles(1e6, z, LAM_DECOMP_BS, 50.0)
        assert np.all(np.diff(cycles) < 0)

    def test_rejects_nonpositive_ratio(self):
        with pytest.raises(ValueError):
            codec_cycles(1e5, 0.0, LAM_LOC, 50.0)


class TestBreachProbability:
    def test_zero_when_level_sufficient(self):
        assert breach_probability(2.0, 5.0, 6.0) == 0.0
        assert breach_probability(2.0, 5.0, 5.0) == 0.0

    def test_pinned_values(self):
        assert breach_probability(1.0, 6.0, 5.0) == pytest.approx(
            0.6321205588285577, rel=1e-12)
        assert breach_probability(3.0, 6.0, 1.0) == pytest.approx(
            0.9999996940976795, rel=1e-12)

    def test_range(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            p = breach_probability(rng.uniform(0.1, 5), rng.uniform(1, 8),
                                   rng.uniform(1, 8))
            assert 0.0 <= p < 1.0


class TestBreachCost:
    def test_zero_when_all_protected(self):
        s = two_md_scenario()
        sol = solution_for(s, assoc=(1, 1), crypto=1)  # level 6 >= expected 5
        assert np.all(breach_cost(s, sol) == 0.0)

    def test_single_task_product(self):
        s = toy_scenario(gains=[[1e-11, 1e-11]], expected=5.0, risk=1.0, loss=1000.0)
        # crypto 0 has level 4 -> P = 1 - e^-1
        sol = solution_for(s, assoc=(1,), chan=(0,), power=(0.1,), crypto=0)
        assert breach_cost(s, sol)[0] == pytest.approx(632.1205588285577, rel=1e-12)

    def test_bounded_by_total_loss(self):
        s = two_md_scenario()
        sol = solution_for(s, assoc=(1, 1), crypto=0)
        psi = breach_cost(s, sol)
        assert np.all(psi >= 0)
        assert np.all(psi <= s.breach_loss.sum(axis=1))


class TestWorkloads:
    def test_sbs_workload_pinned(self):
        # five terms: 3e7 + 4779697.537421578 + 16365829.449671054 + 3.6e7 + 8e6
        got = sbs_workload_cycles(50.0, 1e6, 4e5, 2.5, 5.0, 100.0, 90.0,
                                  LAM_COMP_BS, LAM_DECOMP_BS, 50.0)
        assert got == pytest.approx(95145526.98709263, rel=1e-12)

    def test_sbs_workload_no_second_hop_compute(self):
        full = sbs_workload_cycles(50.0, 1e6, 1e6, 2.5, 5.0, 100.0, 90.0,
                                   LAM_COMP_BS, LAM_DECOMP_BS, 50.0)
        # d2 == d1 leaves no local compute at the SBS, codec/crypto remain
        expected = (codec_cycles(1e6, 2.5, LAM_DECOMP_BS, 50.0)
                    + codec_cycles(1e6, 5.0, LAM_COMP_BS, 50.0)
                    + 90.0 * 1e6 / 2.5 + 100.0 * 1e6 / 5.0)
        assert full == pytest.approx(expected, rel=1e-12)

    def test_mbs_workload_pinned_from_md(self):
        got = mbs_workload_cycles(1e6, 2.5, 50.0, 90.0, LAM_DECOMP_BS, 50.0)
        assert got == pytest.approx(90779697.53742158, rel=1e-12)

    def test_mbs_workload_symmetric_in_hop(self):
        a = mbs_workload_cycles(7e5, 2.7, 60.0, 90.0, LAM_DECOMP_BS, 50.0)
        b = mbs_workload_cycles(7e5, 2.7, 60.0, 90.0, LAM_DECOMP_BS, 50.0)
        assert a == b

    def test_workload_vanishes_with_data(self):
        got = sbs_workload_cycles(50.0, 1e-6, 1e-6, 2.5, 5.0, 100.0, 90.0,
                                  LAM_COMP_BS, LAM_DECOMP_BS, 50.0)
        assert got < 1.0


class TestProportionalShare:
    def test_single_task_gets_everything(self):
        assert proportional_cc_share([3e7], 2e10)[0] == pytest.approx(2e10)

    def test_equal_split(self):
        shares = proportional_cc_share([5e6, 5e6], 2e10)
        assert shares[0] == pytest.approx(1e10) and shares[1] == pytest.approx(1e10)

    def test_partition_of_capacity(self):
        rng = np.random.default_rng(1)
        w = rng.uniform(1e5, 1e8, size=17)
        assert proportional_cc_share(w, 2e10).sum() == pytest.approx(2e10, rel=1e-9)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            proportional_cc_share([], 2e10)

    def test_shares_partition_inside_evaluation(self, small_scenario):
        rng = np.random.default_rng(3)
        for _ in range(5):
            sol = random_solution(small_scenario, rng)
            cb = compute_costs(small_scenario, sol)
            assert cb.mbs_share.sum() == pytest.approx(
                small_scenario.params.mbs_cpu_hz, rel=1e-9)
            for j in range(1, small_scenario.num_sbs + 1):
                rows = sol.assoc == j
                if rows.any():
                    assert cb.sbs_share[rows].sum() == pytest.approx(
                        small_scenario.params.sbs_cpu_hz, rel=1e-9)


class TestPathCosts:
    def test_local_cost_all_local_limit(self):
        s = toy_scenario(gains=[[1e-11, 1e-11]])
        sol = solution_for(s, assoc=(1,), chan=(0,), power=(0.1,), d1=1e-6, d2=1e-6)
        t, e = local_cost(s, sol, 0, 0)
        assert t == pytest.approx(1.6e6 * 50 / 1e9, rel=1e-6)   # 0.08 s
        assert e == pytest.approx(8.0, rel=1e-6)                 # 1e-25*8e7*1e18

    def test_transmit_energy_linear_in_inverse_rate(self):
        s = two_md_scenario()
        lo = solution_for(s, assoc=(1, 1), chan=(0, 1), mu=0.5)
        cb_lo = compute_costs(s, lo)
        # Halve the rate by shrinking the SBS band: transmit term doubles.
        hi = solution_for(s, assoc=(1, 1), chan=(0, 1), mu=0.75)
        cb_hi = compute_costs(s, hi)
        assert cb_hi.rates[0] == pytest.approx(cb_lo.rates[0] / 2, rel=1e-12)
        transmit_lo = lo.power[0] * lo.d1[0, 0] / lo.z1[0, 0] / cb_lo.rates[0]
        transmit_hi = hi.power[0] * hi.d1[0, 0] / hi.z1[0, 0] / cb_hi.rates[0]
        assert transmit_hi == pytest.approx(2 * transmit_lo, rel=1e-12)
        got = cb_hi.local_energy[0, 0] - cb_lo.local_energy[0, 0]
        assert got == pytest.approx(transmit_hi - transmit_lo, rel=1e-9)

    def test_sbs_path_term_by_term(self):
        s = two_md_scenario()
        sol = solution_for(s, assoc=(1, 1), chan=(0, 1))
        i = 0
        cb = compute_costs(s, sol)
        r = cb.rates[i]
        f_bar = cb.sbs_share[i, 0]
        f_hat = cb.mbs_share[i, 0]
        d1, d2, z1, z2, c = 8e5, 4e5, 2.5, 5.0, 50.0
        enc, dec, cre = 100.0, 90.0, 2.5296e-7
        decomp1 = codec_cycles(d1, z1, LAM_DECOMP_BS, 50.0)
        decomp2 = codec_cycles(d2, z2, LAM_DECOMP_BS, 50.0)
        comp2 = codec_cycles(d2, z2, LAM_COMP_BS, 50.0)
        t_terms = [d1 / (z1 * r), d2 / (z2 * 1e9), decomp1 / f_bar,
                   comp2 / f_bar, decomp2 / f_hat, dec * d1 / (z1 * f_bar),
                   enc * d2 / (z2 * f_bar), dec * d2 / (z2 * f_hat),
                   (d1 - d2) * c / f_bar, d2 * c / f_hat]
        e_terms = [1e-3 * d2 / (z2 * 1e9), 1e-9 * decomp1, 1e-9 * comp2,
                   1e-9 * decomp2, cre * d1 / z1, cre * d2 / z2,
                   cre * d2 / z2, 1e-9 * (d1 - d2) * c, 1e-9 * d2 * c]
        t, e = sbs_path_cost(s, sol, i, 0)
        assert t == pytest.approx(sum(t_terms), rel=1e-12)
        assert e == pytest.approx(sum(e_terms), rel=1e-12)

    def test_mbs_path_term_by_term(self):
        s = two_md_scenario()
        sol = solution_for(s, assoc=(0, 1))
        cb = compute_costs(s, sol)
        f_hat = cb.mbs_share[0, 0]
        r = cb.rates[0]
        d1, z1, c, dec, cre = 8e5, 2.5, 50.0, 90.0, 2.5296e-7
        decomp = codec_cycles(d1, z1, LAM_DECOMP_BS, 50.0)
        t_expected = d1 / (z1 * r) + decomp / f_hat + d1 * c / f_hat + dec * d1 / (z1 * f_hat)
        e_expected = 1e-9 * decomp + 1e-9 * d1 * c + cre * d1 / z1
        t, e = mbs_path_cost(s, sol, 0, 0)
        assert t == pytest.approx(t_expected, rel=1e-12)
        assert e == pytest.approx(e_expected, rel=1e-12)

    def test_mbs_path_energy_ignores_power_and_mu(self):
        s = two_md_scenario()
        a = solution_for(s, assoc=(0, 1), power=(0.05, 0.1), mu=0.3)
        b = solution_for(s, assoc=(0, 1), power=(0.19, 0.1), mu=0.9)
        assert mbs_path_cost(s, a, 0, 0)[1] == mbs_path_cost(s, b, 0, 0)[1]

    def test_path_cost_contracts(self):
        s = two_md_scenario()
        sol = solution_for(s, assoc=(0, 1))
        with pytest.raises(ValueError):
            sbs_path_cost(s, sol, 0, 0)
        with pytest.raises(ValueError):
            mbs_path_cost(s, sol, 1, 0)


class TestMdTotals:
    def test_local_dominates(self):
        s = toy_scenario(gains=[[1e-11, 1e-11]])
        sol = solution_for(s, assoc=(1,), chan=(0,), power=(0.1,), d1=1e-6, d2=1e-6)
        cb = compute_costs(s, sol)
        delay, _ = md_totals(s, sol, 0)
        assert delay == cb.local_time[0].sum()

    def test_totals_match_report(self, small_scenario):
        rng = np.random.default_rng(9)
        sol = random_solution(small_scenario, rng)
        report = evaluate_solution(small_scenario, sol)
        d0, e0 = md_totals(small_scenario, sol, 0)
        assert report.delay_s[0] == pytest.approx(d0, rel=1e-12)
        assert report.energy_j[0] == pytest.approx(e0, rel=1e-12)


class TestEvaluateSolution:
    def test_matches_naive_oracle(self, small_scenario):
        rng = np.random.default_rng(42)
        for _ in range(30):
            sol = random_solution(small_scenario, rng)
            report = evaluate_solution(small_scenario, sol)
            delay, energy, psi, total = naive_evaluate(small_scenario, sol)
            np.testing.assert_allclose(report.delay_s, delay, rtol=1e-9)
            np.testing.assert_allclose(report.energy_j, energy, rtol=1e-9)
            np.testing.assert_allclose(report.breach_cost, psi, rtol=1e-9, atol=1e-12)
            assert report.network_energy_j == pytest.approx(total, rel=1e-9)

    def test_network_energy_is_sum(self, small_scenario):
        sol = random_solution(small_scenario, np.random.default_rng(1))
        report = evaluate_solution(small_scenario, sol)
        assert report.network_energy_j == pytest.approx(report.energy_j.sum(), rel=1e-12)
        assert report.network_energy_j >= report.total_local_energy_j >= 0

    def test_all_quantities_finite_nonnegative(self, small_scenario):
        rng = np.random.default_rng(3)
        for _ in range(10):
            sol = random_solution(small_scenario, rng)
            r = evaluate_solution(small_scenario, sol)
            for arr in (r.delay_s, r.energy_j, r.breach_cost,
                        r.delay_violation_s, r.cost_violation):
                assert np.all(np.isfinite(arr)) and np.all(arr >= 0)

    def test_feasibility_flag(self, small_scenario):
        rng = np.random.default_rng(5)
        for _ in range(10):
            sol = random_solution(small_scenario, rng)
            r = evaluate_solution(small_scenario, sol)
            assert r.feasible == (np.all(r.delay_violation_s == 0)
                                  and np.all(r.cost_violation == 0))

    def test_rejects_structural_violations(self, small_scenario):
        rng = np.random.default_rng(7)
        sol = random_solution(small_scenario, rng)
        sol.d2[0, 0] = sol.d1[0, 0] * 2
        with pytest.raises(ValueError):
            evaluate_solution(small_scenario, sol)
        sol = random_solution(small_scenario, rng)
        sol.mu = 1.5
        with pytest.raises(ValueError):
            evaluate_solution(small_scenario, sol)


class TestFitness:
    def _report(self, energy, dv, cv):
        i = len(dv)
        return EvaluationReport(
            delay_s=np.zeros(i), energy_j=np.full(i, energy / i),
            breach_cost=np.zeros(i), network_energy_j=energy,
            total_local_energy_j=energy,
            delay_violation_s=np.asarray(dv, dtype=float),
            cost_violation=np.asarray(cv, dtype=float),
            feasible=not (np.any(dv) or np.any(cv)))

    def test_feasible_is_negative_energy(self):
        r = self._report(12.5, [0, 0], [0, 0])
        assert fitness(r, 10, 10) == -12.5

    def test_penalty_slopes_exact(self):
        base = self._report(12.5, [0, 0], [0, 0])
        bumped = self._report(12.5, [0.5, 0], [0, 0])
        assert fitness(base, 10, 10) - fitness(bumped, 10, 10) == pytest.approx(5.0, abs=1e-12)
        cost = self._report(12.5, [0, 0], [0, 2.0])
        assert fitness(base, 10, 10) - fitness(cost, 10, 10) == pytest.approx(20.0, abs=1e-12)

    def test_huge_penalties_dominate(self):
        feasible = self._report(1e3, [0], [0])
        infeasible = self._report(1e-3, [1e-6], [0])
        assert fitness(feasible) > fitness(infeasible)
