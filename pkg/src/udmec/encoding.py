"""Wave encoding of a candidate solution.

A Wave flattens all decision variables into ten gene groups. Per-task
genes live on "virtual MD" indices: the (md, task) grid flattened
column-major, matching 1-based ind2sub semantics. Gene values are kept
as floats; integer-valued groups are rounded by repair. `repair_wave`
clamps every gene into its box (channel <= subchannel count, second-hop
size <= first-hop size) and is idempotent, so any operator output can
be made structurally valid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import numpy as np

from .scenario import Scenario
from .sysmodel import Solution

# Gene groups in canonical order (also the order mutation applies them,
# so channel sees the already-updated subchannel count and the
# second-hop size sees the updated first-hop size).
GROUPS = ("mu", "n_sub", "bs", "crypto", "power", "z1", "z2", "chan", "d1", "d2")
INTEGER_GROUPS = frozenset({"n_sub", "bs", "crypto", "chan"})
SCALAR_GROUPS = frozenset({"mu", "n_sub"})
PER_MD_GROUPS = frozenset({"power", "bs", "chan"})


@dataclass
class Wave:
    """One candidate solution. bs/crypto/chan are 1-based gene values
    (bs 1 = MBS); height is the stagnation counter used by WWO-style
    search."""

    mu: float
    n_sub: float
    power: np.ndarray   # (I,)
    bs: np.ndarray      # (I,)
    crypto: np.ndarray  # (UK,)
    z1: np.ndarray      # (UK,)
    z2: np.ndarray      # (UK,)
    chan: np.ndarray    # (I,)
    d1: np.ndarray      # (UK,)
    d2: np.ndarray      # (UK,)
    height: int = 0

    def copy(self) -> "Wave":
        return Wave(self.mu, self.n_sub, self.power.copy(), self.bs.copy(),
                    self.crypto.copy(), self.z1.copy(), self.z2.copy(),
                    self.chan.copy(), self.d1.copy(), self.d2.copy(), self.height)

    def get(self, group: str) -> np.ndarray:
        """Group values as a 1-d array (scalars become length-1 arrays)."""
        v = getattr(self, group)
        return np.atleast_1d(np.asarray(v, dtype=float))

    def set(self, group: str, values: np.ndarray) -> None:
        if group in SCALAR_GROUPS:
            setattr(self, group, float(np.asarray(values).reshape(())
                                       if np.ndim(values) == 0 else values[0]))
        else:
            setattr(self, group, np.asarray(values, dtype=float))

    def genes_equal(self, other: "Wave") -> bool:
        return all(np.array_equal(self.get(g), other.get(g)) for g in GROUPS)


@dataclass(frozen=True)
class Bounds:
    """Per-group gene boxes derived from a scenario."""

    eps_zero: float
    eps_one: float
    n_max: int
    num_bs: int      # J + 1, gene value 1 = MBS
    num_crypto: int
    p_max: np.ndarray    # (I,)
    z1_min: float
    z1_max: float
    z2_min: float
    z2_max: float
    d_task: np.ndarray   # (UK,) first-hop size caps, column-major over (md, task)
    num_md: int
    num_tasks: int

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "Bounds":
        p = scenario.params
        return cls(
            eps_zero=p.eps_zero,
            eps_one=p.eps_one,
            n_max=p.max_subchannels,
            num_bs=scenario.num_sbs + 1,
            num_crypto=p.num_crypto,
            p_max=scenario.md_max_power_w,
            z1_min=p.z1_min, z1_max=p.z1_max,
            z2_min=p.z2_min, z2_max=p.z2_max,
            d_task=scenario.size_bits.ravel(order="F").copy(),
            num_md=scenario.num_md,
            num_tasks=scenario.num_tasks,
        )

    def group_size(self, group: str) -> int:
        if group in SCALAR_GROUPS:
            return 1
        if group in PER_MD_GROUPS:
            return self.num_md
        return self.num_md * self.num_tasks

    @cached_property
    def total_genes(self) -> int:
        return sum(self.group_size(g) for g in GROUPS)

    def box(self, group: str):
        """Static (lo, hi) box per component (arrays broadcastable to the
        group size). For chan/d2 this is the widest box; the wave-coupled
        caps (n_sub, d1) are enforced by repair."""
        e0, e1 = self.eps_zero, self.eps_one
        return {
            "mu": (e0, e1),
            "n_sub": (1.0, float(self.n_max)),
            "bs": (1.0, float(self.num_bs)),
            "crypto": (1.0, float(self.num_crypto)),
            "power": (e0, self.p_max),
            "z1": (self.z1_min, self.z1_max),
            "z2": (self.z2_min, self.z2_max),
            "chan": (1.0, float(self.n_max)),
            "d1": (e0, self.d_task),
            "d2": (e0, self.d_task),
        }[group]

    def widths(self, group: str) -> np.ndarray:
        lo, hi = self.box(group)
        return np.broadcast_to(np.asarray(hi, dtype=float) - lo,
                               (self.group_size(group),))

    def diagonal(self, group: str) -> float:
        """Length of the feasible box diagonal (diversity normaliser)."""
        w = self.widths(group)
        return float(max(np.sqrt((w ** 2).sum()), 1e-300))

    # Anchors of the two mutation branches: pull toward hi with weight r1,
    # or toward lo. Offload sizes pull toward 0 (below the repair floor on
    # purpose); channel and second-hop caps are the live wave values.
    def mutation_lo(self, group: str):
        return {
            "mu": self.eps_zero, "n_sub": 1.0, "bs": 1.0, "crypto": 1.0,
            "power": self.eps_zero, "z1": self.z1_min, "z2": self.z2_min,
            "chan": 1.0, "d1": 0.0, "d2": 0.0,
        }[group]

    def mutation_hi(self, group: str, wave: Wave):
        return {
            "mu": self.eps_one, "n_sub": float(self.n_max),
            "bs": float(self.num_bs), "crypto": float(self.num_crypto),
            "power": self.p_max, "z1": self.z1_max, "z2": self.z2_max,
            "chan": wave.n_sub, "d1": self.d_task, "d2": wave.d1,
        }[group]


def virtual_index(i: int, num_md: int, num_tasks: int):
    """1-based linear virtual-MD index -> (md, task), column-major."""
    if not 1 <= i <= num_md * num_tasks:
        raise ValueError(f"virtual index {i} out of range")
    return ((i - 1) % num_md) + 1, ((i - 1) // num_md) + 1


def init_wave(bounds: Bounds, rng: np.random.Generator, height: int = 0) -> Wave:
    """Uniform draw of every gene inside its box (then repaired)."""
    i, uk = bounds.num_md, bounds.num_md * bounds.num_tasks
    mu = rng.uniform()
    n_sub = float(rng.integers(1, bounds.n_max + 1))
    bs = rng.integers(1, bounds.num_bs + 1, size=i).astype(float)
    crypto = rng.integers(1, bounds.num_crypto + 1, size=uk).astype(float)
    power = rng.uniform(0.0, bounds.p_max)
    z1 = rng.uniform(bounds.z1_min, bounds.z1_max, size=uk)
    z2 = rng.uniform(bounds.z2_min, bounds.z2_max, size=uk)
    chan = rng.integers(1, int(n_sub) + 1, size=i).astype(float)
    d1 = rng.uniform(0.0, bounds.d_task)
    d2 = rng.uniform(0.0, d1)
    wave = Wave(mu, n_sub, power, bs, crypto, z1, z2, chan, d1, d2, height)
    return repair_wave(wave, bounds)


def repair_wave(wave: Wave, bounds: Bounds) -> Wave:
    """Clamp every gene into its box in place; idempotent. Integer groups
    are rounded first; the channel cap follows the repaired subchannel
    count and the second-hop size cap follows the repaired first hop."""
    wave.mu = min(max(wave.mu, bounds.eps_zero), bounds.eps_one)
    wave.n_sub = min(max(float(round(wave.n_sub)), 1.0), float(bounds.n_max))
    wave.power = np.clip(wave.power, bounds.eps_zero, bounds.p_max)
    wave.bs = np.clip(np.rint(wave.bs), 1, bounds.num_bs)
    wave.crypto = np.clip(np.rint(wave.crypto), 1, bounds.num_crypto)
    wave.z1 = np.clip(wave.z1, bounds.z1_min, bounds.z1_max)
    wave.z2 = np.clip(wave.z2, bounds.z2_min, bounds.z2_max)
    wave.chan = np.clip(np.rint(wave.chan), 1, wave.n_sub)
    wave.d1 = np.clip(wave.d1, bounds.eps_zero, bounds.d_task)
    wave.d2 = np.clip(wave.d2, bounds.eps_zero, wave.d1)
    return wave


def wave_to_json(wave: Wave) -> str:
    """Serialize a wave for result records / replay. Field order is part
    of the format: mu, n_sub, power, bs, crypto, z1, z2, chan, d1, d2,
    height."""
    import json

    doc = {"mu": wave.mu, "n_sub": wave.n_sub}
    for name in ("power", "bs", "crypto", "z1", "z2", "chan", "d1", "d2"):
        doc[name] = np.asarray(getattr(wave, name), dtype=float).tolist()
    doc["height"] = int(wave.height)
    return json.dumps(doc)


def wave_from_json(text: str) -> Wave:
    import json

    doc = json.loads(text)
    arrays = {name: np.asarray(doc[name], dtype=float)
              for name in ("power", "bs", "crypto", "z1", "z2", "chan", "d1", "d2")}
    return Wave(mu=float(doc["mu"]), n_sub=float(doc["n_sub"]),
                height=int(doc["height"]), **arrays)


def decode_wave(wave: Wave, scenario: Scenario) -> Solution:
    """Repaired wave -> structurally valid Solution (0-based indices)."""
    i, k = scenario.num_md, scenario.num_tasks

    def grid(flat):
        return np.asarray(flat, dtype=float).reshape((i, k), order="F")

    return Solution(
        mu=wave.mu,
        n_sub=int(wave.n_sub),
        power=np.asarray(wave.power, dtype=float),
        assoc=np.asarray(wave.bs, dtype=np.int64) - 1,
        crypto=grid(wave.crypto).astype(np.int64) - 1,
        chan=np.asarray(wave.chan, dtype=np.int64) - 1,
        z1=grid(wave.z1),
        z2=grid(wave.z2),
        d1=grid(wave.d1),
        d2=grid(wave.d2),
    )
