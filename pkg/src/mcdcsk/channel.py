"""AWGN and slow multipath Rayleigh fading at chip resolution."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .frame import ConfigurationError

FADING_KINDS = ("none", "rayleigh")


@dataclass(frozen=True)
class Path:
    gain: float  # average power gain E[lambda**2]
    delay: int  # chips


@dataclass(frozen=True)
class ChannelProfile:
    """Tapped-delay-line channel: paths, noise level and fading law.

    ``N0`` is the one-sided noise level; each real chip sample receives
    Gaussian noise of variance ``N0 / 2``.
    """

    paths: tuple = (Path(1.0, 0),)
    N0: float = 0.0
    fading: str = "none"

    def __post_init__(self):
        paths = tuple(p if isinstance(p, Path) else Path(float(p[0]), int(p[1])) for p in self.paths)
        object.__setattr__(self, "paths", paths)
        if not paths:
            raise ConfigurationError("channel needs at least one path")
        if self.fading not in FADING_KINDS:
            raise ConfigurationError(f"fading must be one of {FADING_KINDS}, got {self.fading!r}")
        if self.N0 < 0:
            raise ConfigurationError("N0 must be non-negative")
        delays = [p.delay for p in paths]
        if delays[0] != 0:
            raise ConfigurationError("first path must be the line-of-sight path with delay 0")
        if any(b <= a for a, b in zip(delays, delays[1:])):
            raise ConfigurationError(f"path delays must be strictly increasing, got {delays}")
        if any(p.gain < 0 for p in paths):
            raise ConfigurationError("path gains must be non-negative")
        if self.fading == "none" and (len(paths) != 1 or paths[0].gain != 1.0):
            raise ConfigurationError("a non-fading channel has exactly one unit-gain path")

    @classmethod
    def awgn(cls, N0: float = 0.0) -> "ChannelProfile":
        return cls(paths=(Path(1.0, 0),), N0=N0, fading="none")

    @classmethod
    def rayleigh(cls, gains: Sequence[float], delays: Sequence[int], N0: float = 0.0) -> "ChannelProfile":
        if len(gains) != len(delays):
            raise ConfigurationError("gains and delays must have the same length")
        return cls(paths=tuple(Path(float(g), int(d)) for g, d in zip(gains, delays)), N0=N0, fading="rayleigh")

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelProfile":
        fading = d.get("fading", "rayleigh" if len(d.get("paths", ())) > 1 else "none")
        if isinstance(fading, bool):
            fading = "rayleigh" if fading else "none"
        raw = d.get("paths") or [{"gain": 1.0, "delay": 0}]
        try:
            paths = tuple(Path(float(p["gain"]), int(p["delay"])) for p in raw)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed path entry: {exc}") from exc
        return cls(paths=paths, N0=float(d.get("N0", 0.0)), fading=fading)

    def to_dict(self) -> dict:
        return {
            "fading": self.fading,
            "N0": self.N0,
            "paths": [{"gain": p.gain, "delay": p.delay} for p in self.paths],
        }

    def with_noise(self, N0: float) -> "ChannelProfile":
        return replace(self, N0=N0)

    @property
    def gains(self) -> np.ndarray:
        return np.array([p.gain for p in self.paths])

    @property
    def delays(self) -> np.ndarray:
        return np.array([p.delay for p in self.paths], dtype=int)

    @property
    def max_delay(self) -> int:
        return self.paths[-1].delay


@dataclass(frozen=True)
class FadingDraw:
    lambdas: np.ndarray = field(default_factory=lambda: np.ones(1))


def draw_fading_batch(profile: ChannelProfile, rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` independent per-frame fading vectors, shape ``(n, L)``.

    Each amplitude is Rayleigh with scale ``sqrt(gain / 2)`` so that
    ``E[lambda**2]`` equals the path's average power gain.
    """
    if profile.fading == "none":
        return np.ones((n, len(profile.paths)))
    scales = np.sqrt(profile.gains / 2.0)
    return rng.rayleigh(size=(n, len(scales))) * scales


def draw_fading(profile: ChannelProfile, rng: np.random.Generator) -> FadingDraw:
    return FadingDraw(lambdas=draw_fading_batch(profile, rng, 1)[0])


def rayleigh_cdf(z, gain: float):
    """CDF of a Rayleigh amplitude with ``E[lambda**2] == gain``."""
    z = np.maximum(np.asarray(z, dtype=float), 0.0)
    return -np.expm1(-z * z / gain)


def apply_channel_stream(
    frames: np.ndarray,
    tail: np.ndarray,
    lambdas: np.ndarray,
    profile: ChannelProfile,
    rng: np.random.Generator,
) -> np.ndarray:
    """Pass consecutive frames through the channel.

    ``frames`` is (F, M, beta) in transmission order, ``tail`` holds the last
    ``max_delay`` chips of every subcarrier sent before the first frame
    (shape (M, max_delay)), ``lambdas`` the per-frame fading (F, L). Delayed
    paths pick up chips of earlier frames, so ISI is physical. Frame ``f``
    uses its own coefficients for every echo that lands inside it.
    """
    frames = np.asarray(frames, dtype=float)
    F, M, beta = frames.shape
    tau_max = profile.max_delay
    tail = np.asarray(tail, dtype=float).reshape(M, tau_max)
    lambdas = np.asarray(lambdas, dtype=float).reshape(F, len(profile.paths))
    if tau_max >= beta:
        warnings.warn(
            f"largest path delay {tau_max} is not shorter than the spreading factor {beta}",
            RuntimeWarning,
            stacklevel=2,
        )
    # (M, tau_max + F*beta) continuous stream per subcarrier
    stream = np.concatenate([tail, frames.transpose(1, 0, 2).reshape(M, F * beta)], axis=1)
    received = np.zeros((F, M, beta))
    for l, path in enumerate(profile.paths):
        start = tau_max - path.delay
        shifted = stream[:, start:start + F * beta].reshape(M, F, beta).transpose(1, 0, 2)
        received += lambdas[:, l, None, None] * shifted
    if profile.N0 > 0:
        received += rng.standard_normal(received.shape) * np.sqrt(profile.N0 / 2.0)
    return received


def apply_channel(
    frame_rows: np.ndarray,
    prev_frame_tail: np.ndarray,
    draw: FadingDraw,
    profile: ChannelProfile,
    rng: np.random.Generator,
) -> np.ndarray:
    """Received (M, beta) matrix for a single frame; see :func:`apply_channel_stream`."""
    rows = np.asarray(frame_rows, dtype=float)
    if rows.ndim != 2:
        raise ValueError("frame_rows must be an (M, beta) matrix")
    M = rows.shape[0]
    tail = np.asarray(prev_frame_tail, dtype=float)
    if tail.size != M * profile.max_delay:
        raise ValueError(f"prev_frame_tail must be ({M}, {profile.max_delay}), got {tail.shape}")
    lambdas = np.asarray(draw.lambdas, dtype=float)
    if lambdas.shape != (len(profile.paths),):
        raise ValueError("fading draw does not match the number of paths")
    return apply_channel_stream(rows[None], tail, lambdas[None], profile, rng)[0]


def awgn_only(frame_rows: np.ndarray, N0: float, rng: np.random.Generator) -> np.ndarray:
    rows = np.asarray(frame_rows, dtype=float)
    profile = ChannelProfile.awgn(N0)
    return apply_channel(rows, np.zeros((rows.shape[0], 0)), FadingDraw(np.ones(1)), profile, rng)
