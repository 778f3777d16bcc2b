"""MC-DCSK and serial DCSK transmit structures and bandwidth arithmetic."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .chaos import ChaoticSequence


class ConfigurationError(ValueError):
    """Raised for parameter sets that cannot describe a valid system."""


def spreading_factor(T_b: float, B: float, M: int, alpha: float) -> int:
    """Largest integer spreading factor the band supports for ``M`` subcarriers."""
    if T_b <= 0 or B <= 0:
        raise ConfigurationError("T_b and B must be positive")
    if M < 2:
        raise ConfigurationError("MC-DCSK needs M >= 2 subcarriers")
    if not 0.0 <= alpha <= 1.0:
        raise ConfigurationError("roll-off alpha must lie in [0, 1]")
    ratio = T_b * B / (M * (1.0 + alpha))
    # absorb representation error such as 19.999999999999996
    beta = math.floor(ratio + 1e-9 * max(1.0, ratio))
    if beta < 1:
        raise ConfigurationError(
            f"band B={B} cannot carry M={M} subcarriers at T_b={T_b} (beta would be {ratio:.3g})"
        )
    return beta


@dataclass(frozen=True)
class SystemConfig:
    M: int
    beta: int
    alpha: float = 0.25
    T_b: Optional[float] = None
    B: Optional[float] = None
    T_c: float = 1.0

    def __post_init__(self):
        if self.M < 2:
            raise ConfigurationError("M must be >= 2")
        if self.beta < 1:
            raise ConfigurationError("beta must be >= 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError("alpha must lie in [0, 1]")
        if self.T_c <= 0:
            raise ConfigurationError("T_c must be positive")

    @classmethod
    def from_band(cls, T_b: float, B: float, M: int, alpha: float = 0.25) -> "SystemConfig":
        """Derive beta from bit duration and total bandwidth; chip time becomes T_b / beta."""
        beta = spreading_factor(T_b, B, M, alpha)
        return cls(M=M, beta=beta, alpha=alpha, T_b=T_b, B=B, T_c=T_b / beta)

    @property
    def bits_per_frame(self) -> int:
        return self.M - 1

    @property
    def mean_bit_energy(self) -> float:
        """Expected bit energy M/(M-1) * beta in chip units (T_c = 1)."""
        return self.M / (self.M - 1) * self.beta


@dataclass(frozen=True)
class SubcarrierPlan:
    f_p: float
    frequencies: np.ndarray
    B_c: float
    delta: float

    @property
    def total_bandwidth(self) -> float:
        return len(self.frequencies) * self.B_c


def frequency_plan(config: SystemConfig, f_p: float = 0.0) -> SubcarrierPlan:
    """Subcarrier centre frequencies and per-subcarrier bandwidth.

    Documentation output only; the simulator treats subcarriers as parallel
    orthogonal channels and never mixes carriers.
    """
    T_c = config.T_c
    freqs = f_p + np.arange(1, config.M + 1) / T_c
    B_c = (1.0 + config.alpha) / T_c
    return SubcarrierPlan(f_p=f_p, frequencies=freqs, B_c=B_c, delta=B_c)


def to_antipodal(bits) -> np.ndarray:
    """Map {0, 1} or {-1, +1} bits onto the internal {-1, +1} alphabet."""
    b = np.asarray(bits)
    if np.all(np.isin(b, (-1, 1))):
        return b.astype(np.int8)
    if np.all(np.isin(b, (0, 1))):
        return np.where(b == 0, -1, 1).astype(np.int8)
    raise ValueError("bits must be in {0, 1} or {-1, +1}")


@dataclass(frozen=True)
class FrameMatrices:
    """Transmit rows of one MC-DCSK frame: reference plus M-1 data rows."""

    reference: np.ndarray
    data: np.ndarray
    bits: np.ndarray

    @property
    def M(self) -> int:
        return self.data.shape[0] + 1

    @property
    def beta(self) -> int:
        return self.reference.shape[0]

    def rows(self) -> np.ndarray:
        """All M subcarrier rows stacked, reference first."""
        return np.vstack([self.reference, self.data])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in self.rows():
                writer.writerow([repr(float(v)) for v in row])


def build_mc_frame(bits: Sequence[int], code: ChaoticSequence) -> FrameMatrices:
    s = np.asarray(bits)
    if s.ndim != 1 or len(s) < 1:
        raise ValueError("bits must be a non-empty vector of length M-1")
    if not np.all(np.isin(s, (-1, 1))):
        raise ValueError("bits must be in {-1, +1}")
    chips = np.asarray(code.chips, dtype=float)
    data = s[:, None] * chips[None, :]
    return FrameMatrices(reference=chips.copy(), data=data, bits=s.astype(np.int8))


def build_mc_frames(bits: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Batched frames: ``bits`` (F, M-1) and ``codes`` (F, beta) -> (F, M, beta)."""
    bits = np.asarray(bits)
    codes = np.asarray(codes, dtype=float)
    if bits.shape[0] != codes.shape[0]:
        raise ValueError("one code per frame is required")
    F, beta = codes.shape
    out = np.empty((F, bits.shape[1] + 1, beta))
    out[:, 0, :] = codes
    out[:, 1:, :] = bits[:, :, None] * codes[:, None, :]
    return out


def build_dcsk_serial(bits: Sequence[int], codes: Sequence[ChaoticSequence]) -> np.ndarray:
    """Serial DCSK chip stream: per bit, ``beta`` reference chips then ``s * reference``."""
    s = np.asarray(bits)
    if len(s) != len(codes):
        raise ValueError(f"need one code per bit, got {len(codes)} codes for {len(s)} bits")
    if not np.all(np.isin(s, (-1, 1))):
        raise ValueError("bits must be in {-1, +1}")
    blocks = []
    for bit, code in zip(s, codes):
        blocks.append(code.chips)
        blocks.append(bit * code.chips)
    return np.concatenate(blocks) if blocks else np.empty(0)
