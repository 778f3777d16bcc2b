"""Seeded, worker-count-independent Monte Carlo BER estimation."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .chaos import chaotic_codes, invariant_seeds
from .channel import ChannelProfile, apply_channel_stream, draw_fading_batch
from .frame import ConfigurationError, SystemConfig, build_mc_frames
from .receiver import demodulate_batch, hard_decision

log = logging.getLogger(__name__)

DEFAULT_MIN_ERRORS = 200
DEFAULT_MAX_BITS = 20_000_000
#: Work unit: roughly this many transmitted chips per block of frames.
CHIPS_PER_BLOCK = 1 << 20


@dataclass(frozen=True)
class RunSpec:
    config: SystemConfig
    profile: ChannelProfile = ChannelProfile.awgn()
    ebno_db: tuple = (10.0,)
    min_errors: int = DEFAULT_MIN_ERRORS
    max_bits: int = DEFAULT_MAX_BITS
    master_seed: int = 0
    workers: int = 1
    noiseless: bool = False

    def __post_init__(self):
        grid = tuple(float(e) for e in np.atleast_1d(self.ebno_db))
        object.__setattr__(self, "ebno_db", grid)
        if not grid:
            raise ConfigurationError("Eb/N0 grid is empty")
        if any(b < a for a, b in zip(grid, grid[1:])):
            raise ConfigurationError("Eb/N0 grid must be sorted")
        if self.min_errors < 1:
            raise ConfigurationError("min_errors must be >= 1")
        if self.max_bits < self.min_errors:
            raise ConfigurationError("max_bits must be >= min_errors")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")

    @property
    def frames_per_block(self) -> int:
        cfg = self.config
        by_chips = max(1, CHIPS_PER_BLOCK // (cfg.M * cfg.beta))
        by_budget = math.ceil(self.max_bits / cfg.bits_per_frame)
        return min(by_chips, by_budget)

    def noise_level(self, ebno_db: float) -> float:
        """N0 placing the mean bit energy M/(M-1)*beta at the requested Eb/N0."""
        if self.noiseless:
            return 0.0
        return self.config.mean_bit_energy / 10.0 ** (ebno_db / 10.0)


@dataclass(frozen=True)
class McPoint:
    ebno_db: float
    errors: int
    bits: int

    @property
    def ber(self) -> float:
        return self.errors / self.bits if self.bits else float("nan")

    @property
    def ci(self) -> tuple[float, float]:
        """95 % Wilson score interval."""
        ci = stats.binomtest(self.errors, self.bits).proportion_ci(0.95, method="wilson")
        return float(ci.low), float(ci.high)


@dataclass
class BerCurve:
    points: list
    M: int
    beta: int
    profile: ChannelProfile
    analytic: dict = field(default_factory=dict)  # ebno_db -> (ber, method)

    HEADER = ["ebno_db", "errors", "bits", "ber", "ci_low", "ci_high", "analytic_ber", "analytic_method"]

    def rows(self):
        for p in self.points:
            lo, hi = p.ci
            ab, am = self.analytic.get(p.ebno_db, ("", ""))
            yield [p.ebno_db, p.errors, p.bits, repr(p.ber), repr(lo), repr(hi), ab if ab == "" else repr(ab), am]

    def to_csv(self, path, header_lines: Sequence[str] = ()) -> None:
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh)
            writer.writerow(self.HEADER)
            writer.writerows(self.rows())


def block_rng(master_seed: int, point: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(point, block)))


def simulate_block(config: SystemConfig, profile: ChannelProfile, n_frames: int,
                   rng: np.random.Generator) -> np.ndarray:
    """Transmit ``n_frames`` consecutive frames; per-bit error flags (n_frames, M-1).

    Leading warm-up frames fill the delay line so the first counted frame
    sees the same ISI as every other one; they are not counted.
    """
    M, beta = config.M, config.beta
    warm = -(-profile.max_delay // beta)
    n = warm + n_frames
    codes = chaotic_codes(invariant_seeds(rng, n), beta)
    bits = np.where(rng.random((n, M - 1)) < 0.5, -1, 1).astype(np.int8)
    lambdas = draw_fading_batch(profile, rng, n)
    frames = build_mc_frames(bits, codes)
    received = apply_channel_stream(frames, np.zeros((M, profile.max_delay)), lambdas, profile, rng)
    decisions = hard_decision(demodulate_batch(received[warm:]))
    return decisions != bits[warm:]


def _block_task(args):
    config, profile, n_frames, seed, point, block = args
    return simulate_block(config, profile, n_frames, block_rng(seed, point, block))


def _simulate_point(spec: RunSpec, point: int, ebno_db: float, pool) -> McPoint:
    profile = spec.profile.with_noise(spec.noise_level(ebno_db))
    per_frame = spec.config.bits_per_frame
    F = spec.frames_per_block
    errors = bits = 0
    block = 0
    wave = spec.workers if pool is not None else 1
    while True:
        tasks = [(spec.config, profile, F, spec.master_seed, point, block + i) for i in range(wave)]
        results = list(pool.map(_block_task, tasks)) if pool is not None else [_block_task(tasks[0])]
        block += wave
        for flags in results:
            frame_err = flags.sum(axis=1)
            cum_err = errors + np.cumsum(frame_err)
            cum_bits = bits + per_frame * np.arange(1, len(frame_err) + 1)
            hit = np.flatnonzero((cum_err >= spec.min_errors) | (cum_bits >= spec.max_bits))
            if hit.size:
                f = hit[0]
                if cum_err[f] >= spec.min_errors and cum_bits[f] <= spec.max_bits:
                    return McPoint(ebno_db, int(cum_err[f]), int(cum_bits[f]))
                # budget ends inside frame f: count its leading bits only
                take = spec.max_bits - (bits + per_frame * f)
                err = errors + int(frame_err[:f].sum()) + int(flags[f, :take].sum())
                return McPoint(ebno_db, err, spec.max_bits)
            errors, bits = int(cum_err[-1]), int(cum_bits[-1])


def run_monte_carlo(spec: RunSpec, analytic=None) -> BerCurve:
    """Simulated BER at every grid point under the RunSpec stopping rule.

    Frames are processed in fixed blocks, each with its own RNG substream
    keyed by (master seed, grid index, block index); results are reduced in
    block order, so they do not depend on ``workers``. ``analytic`` is an
    optional callable ``ebno_db -> (ber, method)`` for a companion curve.
    """
    points = []
    pool = ProcessPoolExecutor(spec.workers) if spec.workers > 1 else None
    try:
        for i, e in enumerate(spec.ebno_db):
            p = _simulate_point(spec, i, e, pool)
            log.info("M=%d beta=%d Eb/N0=%.2f dB: %d errors / %d bits", spec.config.M,
                     spec.config.beta, e, p.errors, p.bits)
            points.append(p)
    finally:
        if pool is not None:
            pool.shutdown()
    curve = BerCurve(points, spec.config.M, spec.config.beta, spec.profile)
    if analytic is not None:
        curve.analytic = {p.ebno_db: analytic(p.ebno_db) for p in points}
    return curve


@dataclass(frozen=True)
class SweepResult:
    values: list
    points: list
    analytic: Optional[list] = None

    @property
    def argmin(self):
        return self.values[int(np.argmin([p.ber for p in self.points]))]


def sweep_beta(template: RunSpec, betas: Sequence[int], ebno_db: float, M: int = 2) -> SweepResult:
    """Simulated BER versus spreading factor at a fixed Eb/N0."""
    points = []
    for beta in betas:
        spec = replace(template, config=replace(template.config, M=M, beta=int(beta)), ebno_db=(ebno_db,))
        points.append(run_monte_carlo(spec).points[0])
    return SweepResult(list(betas), points)


DELAY_SWEEP_GAINS = (4 / 7, 2 / 7, 1 / 7)


def sweep_delay(template: RunSpec, tau2_values: Sequence[int], ebno_db: float = 15.0,
                gains: Sequence[float] = DELAY_SWEEP_GAINS, analytic=None) -> SweepResult:
    """Simulated BER versus second-path delay, third path one chip later.

    ``analytic`` maps a profile to the delay-independent closed-form value.
    """
    points, flat = [], []
    for tau2 in tau2_values:
        profile = ChannelProfile.rayleigh(gains, (0, int(tau2), int(tau2) + 1))
        spec = replace(template, profile=profile, ebno_db=(ebno_db,))
        points.append(run_monte_carlo(spec).points[0])
        if analytic is not None:
            flat.append(analytic(profile))
    return SweepResult(list(tau2_values), points, flat or None)
