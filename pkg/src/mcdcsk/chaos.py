"""Chebyshev chaotic spreading sequences and bit-energy histograms."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SQRT2 = math.sqrt(2.0)
#: Seeds that land on a fixed point of the map within one or two iterations.
DEGENERATE_SEEDS = (0.0, 0.5, -0.5, 1.0, -1.0)
DEFAULT_CLASS_COUNT = 100


def cpf_next(x: float) -> float:
    """One step of the second-order Chebyshev map ``x -> 1 - 2 x**2``."""
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"Chebyshev map is defined on [-1, 1], got {x!r}")
    return 1.0 - 2.0 * x * x


def _check_seed(seed: float) -> None:
    if not -1.0 < seed < 1.0:
        raise ValueError(f"seed must lie in the open interval (-1, 1), got {seed!r}")
    if seed in DEGENERATE_SEEDS:
        raise ValueError(f"seed {seed!r} is a fixed or eventually-fixed point of the map")


def iterate_map(seeds: np.ndarray, n: int) -> np.ndarray:
    """Iterate the raw (unnormalized) map ``n`` times from each seed.

    Returns an array of shape ``seeds.shape + (n,)``; the seed itself is not
    included, element ``[..., 0]`` is its first iterate.
    """
    x = np.asarray(seeds, dtype=float)
    out = np.empty(x.shape + (n,), dtype=float)
    for k in range(n):
        x = 1.0 - 2.0 * x * x
        out[..., k] = x
    return out


def chaotic_codes(seeds: np.ndarray, beta: int) -> np.ndarray:
    """Normalized chips for a batch of seeds, shape ``(len(seeds), beta)``.

    Bit-identical to calling :func:`generate_sequence` on every seed.
    """
    return SQRT2 * iterate_map(seeds, beta)


def invariant_seeds(rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw seeds from the map's invariant (arcsine) density.

    Starting on the invariant density makes every emitted chip stationary, so
    the expected code energy is exactly ``beta``. Degenerate draws (a
    probability-zero event) are redrawn.
    """
    seeds = np.cos(np.pi * rng.random(size))
    bad = np.isin(seeds, DEGENERATE_SEEDS) | (np.abs(seeds) >= 1.0)
    while bad.any():
        seeds[bad] = np.cos(np.pi * rng.random(int(bad.sum())))
        bad = np.isin(seeds, DEGENERATE_SEEDS) | (np.abs(seeds) >= 1.0)
    return seeds


@dataclass(frozen=True)
class ChaoticSequence:
    """One spreading/reference code of ``beta`` normalized chips."""

    chips: np.ndarray
    seed: float
    beta: int

    def __post_init__(self):
        if len(self.chips) != self.beta:
            raise ValueError("chips length does not match beta")
        self.chips.setflags(write=False)

    @property
    def energy(self) -> float:
        return float(np.dot(self.chips, self.chips))


def generate_sequence(seed: float, beta: int) -> ChaoticSequence:
    """Generate ``beta`` chips from ``seed``, scaled by sqrt(2) to unit mean square."""
    _check_seed(seed)
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    chips = chaotic_codes(np.array([seed]), beta)[0]
    return ChaoticSequence(chips=chips, seed=float(seed), beta=int(beta))


@dataclass(frozen=True)
class EnergyHistogram:
    """Empirical distribution of per-bit data energy ``sum(x_k**2)``."""

    bin_centers: np.ndarray
    probabilities: np.ndarray
    beta: int
    n_samples: int

    def __post_init__(self):
        if len(self.bin_centers) != len(self.probabilities) or len(self.bin_centers) == 0:
            raise ValueError("histogram must have matching, non-empty centers and probabilities")

    @property
    def class_count(self) -> int:
        return len(self.bin_centers)

    @property
    def mean(self) -> float:
        return float(np.dot(self.bin_centers, self.probabilities) / np.sum(self.probabilities))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin_center", "probability"])
            for c, p in zip(self.bin_centers, self.probabilities):
                writer.writerow([repr(float(c)), repr(float(p))])

    @classmethod
    def from_csv(cls, path, beta: int, n_samples: int = 0) -> "EnergyHistogram":
        rows = list(csv.DictReader(Path(path).open()))
        centers = np.array([float(r["bin_center"]) for r in rows])
        probs = np.array([float(r["probability"]) for r in rows])
        return cls(centers, probs, beta=beta, n_samples=n_samples)


def estimate_energy_histogram(
    beta: int,
    n_samples: int = 10_000_000,
    class_count: int = DEFAULT_CLASS_COUNT,
    rng_seed: int = 0,
    n_chains: int = 1000,
) -> EnergyHistogram:
    """Histogram of the data energy carried by ``beta`` consecutive chips.

    ``n_samples`` counts chips, as in the classic ten-million-sample
    construction; the trajectory is cut into ``n_samples // beta`` blocks of
    ``beta`` chips. It is generated as ``n_chains`` independent trajectories
    started on the invariant density and advanced in lockstep, which changes
    the sample set but not its distribution.
    """
    if beta < 1:
        raise ValueError("beta must be >= 1")
    if class_count < 2:
        raise ValueError("class_count must be >= 2")
    n_blocks = n_samples // beta
    if n_blocks < class_count:
        raise ValueError(
            f"n_samples={n_samples} gives only {n_blocks} energies for {class_count} classes"
        )
    rng = np.random.default_rng(rng_seed)
    n_chains = max(1, min(n_chains, n_blocks))
    blocks_per_chain = -(-n_blocks // n_chains)
    x = invariant_seeds(rng, n_chains)
    energies = np.empty((n_chains, blocks_per_chain))
    for b in range(blocks_per_chain):
        e = np.zeros(n_chains)
        for _ in range(beta):
            x = 1.0 - 2.0 * x * x
            e += x * x
        energies[:, b] = 2.0 * e
    energies = energies.T.ravel()[:n_blocks]
    if np.var(energies) == 0.0:
        raise RuntimeError("chaotic trajectory collapsed onto a periodic orbit")
    counts, edges = np.histogram(energies, bins=class_count)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return EnergyHistogram(
        bin_centers=centers,
        probabilities=counts / counts.sum(),
        beta=int(beta),
        n_samples=int(n_samples),
    )
