"""Non-coherent matrix correlator receiver."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .chaos import chaotic_codes, invariant_seeds
from .channel import ChannelProfile, FadingDraw
from .frame import SystemConfig


@dataclass(frozen=True)
class ReceiverOutput:
    decisions: np.ndarray
    decision_variables: np.ndarray
    reference: np.ndarray
    data: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bit_index", "decision_variable", "decision"])
            for i, (d, s) in enumerate(zip(self.decision_variables, self.decisions)):
                writer.writerow([i, repr(float(d)), int(s)])


def hard_decision(d: np.ndarray) -> np.ndarray:
    """Sign with ties resolved to +1."""
    return np.where(np.asarray(d) < 0, -1, 1).astype(np.int8)


def demodulate(received: np.ndarray) -> ReceiverOutput:
    """Correlate the reference row against every data row.

    Row 0 is the reference P, rows 1..M-1 form S; the decision variables are
    ``P @ S.T``. The receiver uses no channel or noise knowledge.
    """
    r = np.asarray(received, dtype=float)
    if r.ndim != 2 or r.shape[0] < 2:
        raise ValueError("received frame must be a matrix with at least 2 rows")
    P, S = r[0], r[1:]
    D = P @ S.T
    return ReceiverOutput(decisions=hard_decision(D), decision_variables=D, reference=P, data=S)


def demodulate_batch(received: np.ndarray) -> np.ndarray:
    """Decision variables for a stack of frames (F, M, beta) -> (F, M-1)."""
    r = np.asarray(received, dtype=float)
    return np.einsum("fk,fik->fi", r[:, 0, :], r[:, 1:, :])


def _multipath_copy(codes: np.ndarray, lambdas: np.ndarray, delays) -> np.ndarray:
    """Noiseless received rows for isolated frames (nothing transmitted before)."""
    out = np.zeros_like(codes)
    beta = codes.shape[1]
    for lam, d in zip(lambdas, delays):
        if d < beta:
            out[:, d:] += lam * codes[:, :beta - d]
    return out


def decision_stats(
    config: SystemConfig,
    profile: ChannelProfile,
    n_trials: int,
    rng: np.random.Generator,
    draw: FadingDraw | None = None,
    code: np.ndarray | None = None,
    batch: int = 50_000,
) -> tuple[float, float, np.ndarray]:
    """Monte Carlo mean and variance of D for a transmitted +1.

    With ``code`` given every trial reuses it, which is the conditioning
    under which the closed-form mean and variance hold; otherwise a fresh
    chaotic code is drawn per trial. ``draw`` fixes the fading coefficients
    (all ones when omitted). Each trial is an isolated frame, so no ISI.
    Noise level is ``profile.N0``. Returns ``(mean, variance, samples)``.
    """
    beta = config.beta
    lambdas = np.ones(len(profile.paths)) if draw is None else np.asarray(draw.lambdas, dtype=float)
    sigma = np.sqrt(profile.N0 / 2.0)
    samples = np.empty(n_trials)
    done = 0
    while done < n_trials:
        n = min(batch, n_trials - done)
        if code is not None:
            codes = np.broadcast_to(np.asarray(code, dtype=float), (n, beta))
        else:
            codes = chaotic_codes(invariant_seeds(rng, n), beta)
        clean = _multipath_copy(codes, lambdas, profile.delays)
        P = clean + sigma * rng.standard_normal(clean.shape)
        S = clean + sigma * rng.standard_normal(clean.shape)
        samples[done:done + n] = np.einsum("nk,nk->n", P, S)
        done += n
    return float(samples.mean()), float(samples.var(ddof=1)), samples
