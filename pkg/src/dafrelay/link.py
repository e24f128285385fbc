"""Differential M-PSK modulation and the two-phase relay transmit chain."""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Constellation",
    "PowerAllocation",
    "LinkObservation",
    "diff_encode",
    "transmit",
]


@dataclass(frozen=True)
class Constellation:
    """M-PSK symbol set with binary-reflected Gray mapping.

    Symbol index m sits at angle 2*pi*m/M and carries the bit pattern
    gray_of_index[m] = m ^ (m >> 1), so adjacent symbols differ in one bit.
    """

    M: int
    symbols: np.ndarray = field(repr=False)
    gray_of_index: np.ndarray = field(repr=False)
    index_of_gray: np.ndarray = field(repr=False)
    d_min_sq: float

    @classmethod
    def of(cls, M: int) -> "Constellation":
        if M < 2 or M & (M - 1):
            raise ValueError(f"M must be a power of 2 >= 2, got {M}")
        m = np.arange(M)
        symbols = np.exp(2j * np.pi * m / M)
        # the reference point and any symbols on the axes are exact
        symbols[0] = 1.0
        if M % 4 == 0:
            symbols[M // 4] = 1j
            symbols[M // 2] = -1.0
            symbols[3 * M // 4] = -1j
        elif M == 2:
            symbols[1] = -1.0
        gray = m ^ (m >> 1)
        inv = np.empty(M, dtype=int)
        inv[gray] = m
        return cls(M, symbols, gray, inv, float(4.0 * np.sin(np.pi / M) ** 2))

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.M))


@dataclass(frozen=True)
class PowerAllocation:
    """Source/relay powers (linear) and the relay amplification factor."""

    P_total: float
    P0: float
    P1: float
    A: float

    @classmethod
    def equal_from_total_db(cls, p_db: float) -> "PowerAllocation":
        """Equal split P0 = P1 = P/2 with A = sqrt(P1/(P0+1))."""
        p = 10.0 ** (p_db / 10.0)
        p0 = p1 = p / 2.0
        return cls(p, p0, p1, float(np.sqrt(p1 / (p0 + 1.0))))

    def __post_init__(self):
        if self.P0 <= 0 or self.P1 <= 0:
            raise ValueError("P0 and P1 must be positive")


@dataclass
class LinkObservation:
    """Destination observations from the two phases, plus genie side information."""

    y_sd: np.ndarray
    y_rd: np.ndarray
    h_rd: np.ndarray
    tx_symbols: np.ndarray  # transmitted constellation indices (data, no reference)


def diff_encode(symbols, constellation: Constellation):
    """Differentially encode data indices: s[k] = v[k] * s[k-1], s[0] = 1.

    `symbols` holds constellation indices along the last axis; the output has
    one extra entry (the reference).  Encoding accumulates indices modulo M so
    every s[k] is exactly a constellation point (|s[k]| = 1 exactly).
    """
    idx = np.asarray(symbols)
    if np.any(idx < 0) or np.any(idx >= constellation.M):
        raise ValueError("symbol index out of range")
    acc = np.cumsum(idx, axis=-1) % constellation.M
    pad = [(0, 0)] * (idx.ndim - 1) + [(1, 0)]
    acc = np.pad(acc, pad)
    return constellation.symbols[acc]


def transmit(s, h_sd, h_sr, h_rd, power: PowerAllocation, rng, with_noise: bool = True) -> LinkObservation:
    """Run the two-phase chain: source broadcast, then amplified relay forward.

    y_sd = sqrt(P0) h_sd s + w_sd
    y_sr = sqrt(P0) h_sr s + w_sr
    y_rd = A h_rd y_sr + w_rd

    The relay observation is formed physically, so the equivalent-noise
    structure of the cascaded link emerges rather than being injected.
    All noises are i.i.d. CN(0,1); arrays may be 1D or (realizations, length).
    """
    s = np.asarray(s)
    shape = s.shape
    sq = np.sqrt(2.0)
    if with_noise:
        w_sd = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / sq
        w_sr = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / sq
        w_rd = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / sq
    else:
        w_sd = w_sr = w_rd = 0.0
    sp0 = np.sqrt(power.P0)
    y_sd = sp0 * h_sd * s + w_sd
    y_sr = sp0 * h_sr * s + w_sr
    y_rd = power.A * h_rd * y_sr + w_rd
    return LinkObservation(y_sd, y_rd, np.asarray(h_rd), np.asarray([]))
