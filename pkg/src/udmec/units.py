"""Unit conversions used at the configuration boundary.

Everything inside the package runs in SI base units: bits, Hz, seconds,
watts, joules, CPU cycles. Config files may speak dBm / KB / GHz; these
helpers translate at load time only.
"""

KB_BITS = 1024 * 8  # 1 KB = 1024 bytes


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise ValueError("power must be positive")
    import math

    return 10.0 * math.log10(watts * 1e3)


def kb_to_bits(kb: float) -> float:
    return kb * KB_BITS


def ghz_to_hz(ghz: float) -> float:
    return ghz * 1e9
