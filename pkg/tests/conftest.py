import numpy as np
import pytest

from udmec.scenario import Scenario, ScenarioParams, build_scenario
from udmec.sysmodel import Solution


def random_solution(scenario, rng):
    """Uniform draw over the structural constraint box (independent of
    the wave encoding)."""
    p = scenario.params
    i, k = scenario.num_md, scenario.num_tasks
    n_sub = int(rng.integers(1, p.max_subchannels + 1))
    d1 = rng.uniform(p.eps_zero, scenario.size_bits)
    return Solution(
        mu=rng.uniform(p.eps_zero, p.eps_one),
        n_sub=n_sub,
        power=rng.uniform(p.eps_zero, scenario.md_max_power_w),
        assoc=rng.integers(0, scenario.num_sbs + 1, size=i),
        crypto=rng.integers(0, p.num_crypto, size=(i, k)),
        chan=rng.integers(0, n_sub, size=i),
        z1=rng.uniform(p.z1_min, p.z1_max, size=(i, k)),
        z2=rng.uniform(p.z2_min, p.z2_max, size=(i, k)),
        d1=d1,
        d2=rng.uniform(p.eps_zero, d1),
    )


def small_params(**over):
    """10 MDs, 5 SBSs, 2 tasks: the workhorse test instance."""
    defaults = dict(num_md=10, num_sbs=5, num_tasks_per_md=2, num_clusters=3)
    defaults.update(over)
    return ScenarioParams(**defaults)


def tiny_params(**over):
    """2 MDs, 1 SBS, 1 task, 2 crypto algorithms, 2 subchannels."""
    defaults = dict(
        num_md=2, num_sbs=1, num_tasks_per_md=1, num_clusters=1,
        num_crypto=2, max_subchannels=2,
        encrypt_cycles_per_bit=(100.0, 1050.0),
        decrypt_cycles_per_bit=(90.0, 1700.0),
        crypto_energy_per_bit_j=(2.5296e-7, 26.3643e-7),
        crypto_levels=(4.0, 6.0),
    )
    defaults.update(over)
    return ScenarioParams(**defaults)


def toy_scenario(gains, params=None, sizes=None, cycles=None, clusters=None,
                 expected=None, risk=None, loss=None, deadline=None,
                 budget=None):
    """Hand-built scenario with exact, controlled numbers."""
    gains = np.asarray(gains, dtype=float)
    i, num_bs = gains.shape
    j = num_bs - 1
    if params is None:
        params = ScenarioParams(num_md=i, num_sbs=j, num_clusters=1,
                                num_crypto=2, max_subchannels=2,
                                num_tasks_per_md=1,
                                encrypt_cycles_per_bit=(100.0, 1050.0),
                                decrypt_cycles_per_bit=(90.0, 1700.0),
                                crypto_energy_per_bit_j=(2.5296e-7, 26.3643e-7),
                                crypto_levels=(4.0, 6.0))
    k = params.num_tasks_per_md

    def grid(value, default):
        if value is None:
            value = default
        return np.broadcast_to(np.asarray(value, dtype=float), (i, k)).copy()

    return Scenario(
        params=params,
        md_pos_km=np.zeros((i, 2)),
        bs_pos_km=np.zeros((num_bs, 2)),
        gains=gains,
        cluster_of_sbs=(np.zeros(j, dtype=np.int64) if clusters is None
                        else np.asarray(clusters, dtype=np.int64)),
        size_bits=grid(sizes, 1.6e6),
        cycles_per_bit=grid(cycles, 50.0),
        expected_level=grid(expected, 5.0),
        risk_coeff=grid(risk, 1.0),
        breach_loss=grid(loss, 1000.0),
        deadline_s=np.full(i, 8.0) if deadline is None else np.asarray(deadline, dtype=float),
        breach_budget=np.full(i, 7000.0) if budget is None else np.asarray(budget, dtype=float),
        md_cpu_hz=np.full(i, params.md_cpu_hz),
        md_max_power_w=np.full(i, params.md_max_power_w),
    )


@pytest.fixture(scope="session")
def small_scenario():
    return build_scenario(small_params(), seed=11)


@pytest.fixture(scope="session")
def tiny_scenario():
    return build_scenario(tiny_params(), seed=5)
