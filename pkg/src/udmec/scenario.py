"""Reproducible ultra-dense network instances.

A Scenario is an immutable snapshot of one macrocell: base-station and
device placement, linear channel gains (pathloss + static log-normal
shadowing), the SBS cluster map, per-task parameters and per-node
capacities. Identical (params, seed) pairs rebuild bit-identical
scenarios, so every experiment is replayable from two numbers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from functools import cached_property

import numpy as np

from .units import dbm_to_watts, kb_to_bits


class ConfigurationError(ValueError):
    """Invalid scenario/optimizer/experiment configuration."""


# Pathloss model constants (dB, distances in km).
_MACRO_PL = (128.1, 37.6)
_SMALL_PL = (140.7, 36.7)


@dataclass(frozen=True)
class ScenarioParams:
    """Generation knobs for one network instance, all in SI units.

    Ranges are (low, high) for uniform draws. Defaults reproduce the
    reference simulation setup; `num_sbs` defaults to 20 (the deployment
    figure; 30 also appears in the source material and can be set here).
    """

    macrocell_radius_km: float = 0.5
    num_sbs: int = 20
    num_md: int = 20
    num_tasks_per_md: int = 3
    num_clusters: int = 6
    num_crypto: int = 6
    max_subchannels: int = 5
    system_bandwidth_hz: float = 20e6
    noise_power_w: float = 1e-14
    backhaul_rate_bps: float = 1e9
    wired_power_w: float = 1e-3
    md_max_power_w: float = dbm_to_watts(23.0)
    md_cpu_hz: float = 1e9
    sbs_cpu_hz: float = 20e9
    mbs_cpu_hz: float = 20e9
    bs_energy_per_cycle_j: float = 1e-9
    switched_capacitance: float = 1e-25
    codec_xi: float = 50.0
    # (coefficient, exponent, offset) triples of the cycle-cost model.
    md_compression_coeffs: tuple = (1.027e-15, 32.28, 0.3)
    bs_compression_coeffs: tuple = (0.076, 0.7116, 0.5794)
    bs_decompression_coeffs: tuple = (0.115, -0.9179, 0.046)
    z1_min: float = 2.3
    z1_max: float = 2.9
    z2_min: float = 3.4
    z2_max: float = 11.2
    task_size_bits_range: tuple = (kb_to_bits(200), kb_to_bits(500))
    cycles_per_bit_range: tuple = (50.0, 100.0)
    deadline_s_range: tuple = (5.0, 10.0)
    breach_loss_range: tuple = (1000.0, 5000.0)
    breach_budget_range: tuple = (5000.0, 10000.0)
    risk_coeff_range: tuple = (1.0, 3.0)
    expected_level_choices: tuple = (5.0, 6.0)
    encrypt_cycles_per_bit: tuple = (100.0, 200.0, 250.0, 300.0, 350.0, 1050.0)
    decrypt_cycles_per_bit: tuple = (90.0, 280.0, 350.0, 300.0, 400.0, 1700.0)
    crypto_energy_per_bit_j: tuple = (
        2.5296e-7, 5.0425e-7, 6.837e-7, 7.8528e-7, 8.7073e-7, 26.3643e-7,
    )
    crypto_levels: tuple = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    shadowing_std_db: float = 8.0
    eps_zero: float = 1e-6      # open-interval floor (stands in for 0)
    eps_one: float = 1 - 1e-6   # open-interval ceiling (stands in for 1)

    def validate(self) -> None:
        counts = {
            "num_sbs": self.num_sbs,
            "num_md": self.num_md,
            "num_tasks_per_md": self.num_tasks_per_md,
            "num_clusters": self.num_clusters,
            "num_crypto": self.num_crypto,
            "max_subchannels": self.max_subchannels,
        }
        for name, value in counts.items():
            if int(value) != value or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
        if self.num_clusters > self.num_sbs:
            raise ConfigurationError("num_clusters cannot exceed num_sbs")
        for name in ("task_size_bits_range", "cycles_per_bit_range", "deadline_s_range",
                     "breach_loss_range", "breach_budget_range", "risk_coeff_range"):
            lo, hi = getattr(self, name)
            if not (0 < lo <= hi):
                raise ConfigurationError(f"{name} must satisfy 0 < low <= high, got ({lo}, {hi})")
        if not self.z1_min < self.z1_max:
            raise ConfigurationError("z1_min must be < z1_max")
        if not self.z2_min < self.z2_max:
            raise ConfigurationError("z2_min must be < z2_max")
        q = self.num_crypto
        for name in ("encrypt_cycles_per_bit", "decrypt_cycles_per_bit",
                     "crypto_energy_per_bit_j", "crypto_levels"):
            if len(getattr(self, name)) != q:
                raise ConfigurationError(f"{name} must have length num_crypto={q}")
        if not (0 < self.eps_zero < self.eps_one < 1):
            raise ConfigurationError("need 0 < eps_zero < eps_one < 1")
        positives = ("macrocell_radius_km", "system_bandwidth_hz", "noise_power_w",
                     "backhaul_rate_bps", "wired_power_w", "md_max_power_w", "md_cpu_hz",
                     "sbs_cpu_hz", "mbs_cpu_hz", "bs_energy_per_cycle_j",
                     "switched_capacitance", "codec_xi")
        for name in positives:
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")


@dataclass(frozen=True)
class Scenario:
    """One immutable network instance (MBS is BS index 0, SBSs are 1..J)."""

    params: ScenarioParams
    md_pos_km: np.ndarray        # (I, 2)
    bs_pos_km: np.ndarray        # (J+1, 2), row 0 = MBS
    gains: np.ndarray            # (I, J+1) linear channel gains
    cluster_of_sbs: np.ndarray   # (J,) cluster label per SBS, 0-based
    size_bits: np.ndarray        # (I, K)
    cycles_per_bit: np.ndarray   # (I, K)
    expected_level: np.ndarray   # (I, K)
    risk_coeff: np.ndarray       # (I, K)
    breach_loss: np.ndarray      # (I, K)
    deadline_s: np.ndarray       # (I,)
    breach_budget: np.ndarray    # (I,)
    md_cpu_hz: np.ndarray        # (I,)
    md_max_power_w: np.ndarray   # (I,)

    @property
    def num_md(self) -> int:
        return self.gains.shape[0]

    @property
    def num_sbs(self) -> int:
        return self.gains.shape[1] - 1

    @property
    def num_tasks(self) -> int:
        return self.size_bits.shape[1]

    @cached_property
    def crypto_tables(self):
        """(encrypt cpb, decrypt cpb, energy per bit, level) as arrays
        indexed by algorithm, cached for the evaluation hot path."""
        p = self.params
        return (np.asarray(p.encrypt_cycles_per_bit, dtype=float),
                np.asarray(p.decrypt_cycles_per_bit, dtype=float),
                np.asarray(p.crypto_energy_per_bit_j, dtype=float),
                np.asarray(p.crypto_levels, dtype=float))


def pathloss_gain(distance_km, tier: str, shadow_db=0.0):
    """Linear channel gain at `distance_km` for a macro or small BS link.

    `shadow_db` is the log-normal shadowing realisation (drawn by the
    caller). Accepts scalars or arrays.
    """
    distance_km = np.asarray(distance_km, dtype=float)
    if np.any(distance_km <= 0):
        raise ValueError("distance must be positive")
    if tier == "macro":
        a, b = _MACRO_PL
    elif tier == "small":
        a, b = _SMALL_PL
    else:
        raise ValueError(f"unknown tier {tier!r}")
    pl_db = a + b * np.log10(distance_km)
    gain = 10.0 ** (-(pl_db + np.asarray(shadow_db, dtype=float)) / 10.0)
    return gain if gain.ndim else float(gain)


def cluster_sbs(positions: np.ndarray, num_clusters: int, seed: int) -> np.ndarray:
    """Lloyd K-means over 2-D SBS positions; returns 0-based labels.

    Seeded initialisation (distinct points), iteration cap, and a final
    nearest-centroid assignment so the returned labels always satisfy
    the fixed-point property.
    """
    positions = np.asarray(positions, dtype=float)
    n = positions.shape[0]
    if num_clusters > n:
        raise ConfigurationError(f"cannot form {num_clusters} clusters from {n} SBSs")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    centers = positions[rng.choice(n, size=num_clusters, replace=False)].copy()

    def assign(centers):
        d2 = ((positions[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        return np.argmin(d2, axis=1)

    labels = assign(centers)
    for _ in range(100):
        new_centers = centers.copy()
        for c in range(num_clusters):
            mask = labels == c
            if mask.any():
                new_centers[c] = positions[mask].mean(axis=0)
            else:
                # Re-seed an empty cluster at the point farthest from its centroid.
                d2 = ((positions - centers[labels]) ** 2).sum(axis=1)
                new_centers[c] = positions[np.argmax(d2)]
        new_labels = assign(new_centers)
        centers = new_centers
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    return assign(centers)


def _uniform_disc(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(size=n))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def build_scenario(params: ScenarioParams, seed: int) -> Scenario:
    """Draw one network instance. Pure function of (params, seed)."""
    params.validate()
    ss = np.random.SeedSequence(seed)
    draw_ss, cluster_ss = ss.spawn(2)
    rng = np.random.default_rng(draw_ss)

    i, j, k = params.num_md, params.num_sbs, params.num_tasks_per_md
    radius = params.macrocell_radius_km

    sbs_pos = _uniform_disc(rng, j, radius)
    md_pos = _uniform_disc(rng, i, radius)
    bs_pos = np.vstack([np.zeros((1, 2)), sbs_pos])  # MBS at the centre

    dist = np.sqrt(((md_pos[:, None, :] - bs_pos[None, :, :]) ** 2).sum(axis=2))
    shadow = rng.normal(0.0, params.shadowing_std_db, size=(i, j + 1))
    gains = np.empty((i, j + 1))
    gains[:, 0] = pathloss_gain(dist[:, 0], "macro", shadow[:, 0])
    gains[:, 1:] = pathloss_gain(dist[:, 1:], "small", shadow[:, 1:])

    clusters = cluster_sbs(sbs_pos, params.num_clusters,
                           int(cluster_ss.generate_state(1)[0]))

    def draw(lo_hi, shape):
        lo, hi = lo_hi
        return rng.uniform(lo, hi, size=shape)

    size_bits = draw(params.task_size_bits_range, (i, k))
    cycles = draw(params.cycles_per_bit_range, (i, k))
    levels = rng.choice(np.asarray(params.expected_level_choices, dtype=float), size=(i, k))
    risk = draw(params.risk_coeff_range, (i, k))
    loss = draw(params.breach_loss_range, (i, k))
    deadline = draw(params.deadline_s_range, i)
    budget = draw(params.breach_budget_range, i)

    return Scenario(
        params=params,
        md_pos_km=_freeze(md_pos),
        bs_pos_km=_freeze(bs_pos),
        gains=_freeze(gains),
        cluster_of_sbs=_freeze(clusters),
        size_bits=_freeze(size_bits),
        cycles_per_bit=_freeze(cycles),
        expected_level=_freeze(levels),
        risk_coeff=_freeze(risk),
        breach_loss=_freeze(loss),
        deadline_s=_freeze(deadline),
        breach_budget=_freeze(budget),
        md_cpu_hz=_freeze(np.full(i, params.md_cpu_hz)),
        md_max_power_w=_freeze(np.full(i, params.md_max_power_w)),
    )


_ARRAY_FIELDS = (
    "md_pos_km", "bs_pos_km", "gains", "cluster_of_sbs", "size_bits",
    "cycles_per_bit", "expected_level", "risk_coeff", "breach_loss",
    "deadline_s", "breach_budget", "md_cpu_hz", "md_max_power_w",
)


def scenario_to_json(scenario: Scenario) -> str:
    """Structured-text snapshot for replay (exact float round trip)."""
    doc = {"params": asdict(scenario.params)}
    for name in _ARRAY_FIELDS:
        arr = getattr(scenario, name)
        doc[name] = {"shape": list(arr.shape), "data": arr.ravel().tolist()}
    return json.dumps(doc)


def scenario_from_json(text: str) -> Scenario:
    doc = json.loads(text)
    raw = doc["params"]
    for key, value in raw.items():
        if isinstance(value, list):
            raw[key] = tuple(value)
    params = ScenarioParams(**raw)
    fields = {}
    for name in _ARRAY_FIELDS:
        spec = doc[name]
        dtype = np.int64 if name == "cluster_of_sbs" else float
        fields[name] = _freeze(np.asarray(spec["data"], dtype=dtype).reshape(spec["shape"]))
    return Scenario(params=params, **fields)
