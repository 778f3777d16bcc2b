"""Closed-form and numerically integrated BER of MC-DCSK."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate, special

from .chaos import EnergyHistogram
from .channel import ChannelProfile

#: Nodes of the log-spaced trapezoid used for the fading average.
QUAD_NODES = 2000
QUAD_LO = 1e-6
QUAD_HI = 50.0


def erfc(x):
    """Complementary error function (Cephes rational approximations via scipy)."""
    return special.erfc(x)


def db_to_linear(db):
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0)


def dbr(M: int) -> float:
    """Data-energy-to-bit-energy ratio ``(M - 1) / M``."""
    if M < 2:
        raise ValueError("DBR needs M >= 2")
    return (M - 1) / M


def reference_share(M: int) -> float:
    """Fraction of each bit's energy spent on the shared reference, ``1 - dbr(M)``."""
    return 1.0 / M if M >= 2 else dbr(M)


def bit_energy(M: int, E_data: float) -> float:
    return M / (M - 1) * E_data


def decision_moments(M: int, beta: int, E_b: float, sum_lambda2: float, N0: float,
                     cross_term_factor: float = 1.0) -> tuple[float, float]:
    """Conditional mean and variance of the correlator output for a +1 bit.

    ``cross_term_factor`` scales the signal-by-noise part of the variance.
    The default 1 gives the closed form ``DBR*E_b*sum(l^2)*N0/2 + beta*N0^2/4``.
    A value of 2 counts the noise on both correlator inputs, and that is what
    an independent-Gaussian channel produces.
    """
    signal = (M - 1) / M * sum_lambda2 * E_b
    var = cross_term_factor * signal * N0 / 2.0 + beta * N0 ** 2 / 4.0
    return signal, var


def ber_conditional(gamma_b, M: int, beta: int, cross_term_factor: float = 1.0):
    """BER for a given instantaneous SNR per bit (Gaussian approximation).

    ``0.5 * erfc([M/((M-1) g) + M^2 beta / (2 (M-1)^2 g^2)]^-1/2)``; accepts
    scalars or arrays. See :func:`decision_moments` for ``cross_term_factor``.
    """
    g = np.asarray(gamma_b, dtype=float)
    if np.any(~(g > 0)):
        raise ValueError("gamma_b must be positive")
    k = M / (M - 1)
    bracket = cross_term_factor * k / g + k * k * beta / (2.0 * g * g)
    out = 0.5 * erfc(1.0 / np.sqrt(bracket))
    return float(out) if out.ndim == 0 else out


def ber_bpsk_reference(ebno_db):
    """Coherent BPSK over AWGN, ``0.5 * erfc(sqrt(Eb/N0))``."""
    out = 0.5 * erfc(np.sqrt(db_to_linear(ebno_db)))
    return float(out) if np.ndim(out) == 0 else out


def ber_awgn_high_sf(ebno_db, M: int, beta: int, cross_term_factor: float = 1.0):
    """Constant-bit-energy AWGN BER: the conditional BER at ``gamma_b = Eb/N0``."""
    return ber_conditional(db_to_linear(ebno_db), M, beta, cross_term_factor)


# -- SNR densities -----------------------------------------------------------

def snr_pdf_iid(gamma, gbar_c: float, L: int):
    """Density of the sum of ``L`` i.i.d. exponential SNRs with mean ``gbar_c``."""
    if gbar_c <= 0 or L < 1:
        raise ValueError("need gbar_c > 0 and L >= 1")
    g = np.asarray(gamma, dtype=float)
    gp = np.maximum(g, 0.0)
    if L == 1:
        out = np.exp(-gp / gbar_c) / gbar_c
    else:
        with np.errstate(divide="ignore"):
            log_f = (L - 1) * np.log(gp) - math.lgamma(L) - L * math.log(gbar_c) - gp / gbar_c
        out = np.exp(log_f)
    out = np.where(g < 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def _rho(gbars: np.ndarray) -> np.ndarray:
    L = len(gbars)
    rho = np.ones(L)
    for l in range(L):
        for j in range(L):
            if j != l:
                rho[l] *= gbars[l] / (gbars[l] - gbars[j])
    return rho


def _check_distinct(gbars) -> np.ndarray:
    gb = np.asarray(gbars, dtype=float)
    if gb.ndim != 1 or len(gb) == 0 or np.any(gb <= 0):
        raise ValueError("average SNRs must be a non-empty list of positive values")
    if len(np.unique(gb)) != len(gb):
        raise ValueError("dissimilar-path density needs pairwise distinct average SNRs; "
                         "use snr_pdf_iid for equal-gain paths")
    return gb


def snr_pdf_dissimilar(gamma, gbars: Sequence[float]):
    """Density of a sum of independent exponential SNRs with distinct means."""
    gb = _check_distinct(gbars)
    rho = _rho(gb)
    g = np.asarray(gamma, dtype=float)
    terms = (rho / gb) * np.exp(-np.maximum(g, 0.0)[..., None] / gb)
    out = np.where(g < 0, 0.0, np.maximum(terms.sum(axis=-1), 0.0))
    return float(out) if out.ndim == 0 else out


def snr_cdf_iid(gamma, gbar_c: float, L: int):
    return special.gammainc(L, np.maximum(np.asarray(gamma, dtype=float), 0.0) / gbar_c)


def snr_cdf_dissimilar(gamma, gbars: Sequence[float]):
    gb = _check_distinct(gbars)
    rho = _rho(gb)
    g = np.maximum(np.asarray(gamma, dtype=float), 0.0)
    return np.clip((rho * -np.expm1(-g[..., None] / gb)).sum(axis=-1), 0.0, 1.0)


@dataclass(frozen=True)
class SnrPdf:
    """Distribution of the instantaneous SNR per bit.

    ``kind`` is ``"iid"`` (params: gbar_c, L), ``"dissimilar"`` (params:
    per-path average SNRs) or ``"empirical"`` (point masses at ``support``
    with ``weights``).
    """

    kind: str
    gbar_c: float = 0.0
    L: int = 1
    gbars: tuple = ()
    support: np.ndarray = field(default_factory=lambda: np.empty(0))
    weights: np.ndarray = field(default_factory=lambda: np.empty(0))

    @classmethod
    def iid(cls, gbar_c: float, L: int) -> "SnrPdf":
        if gbar_c <= 0 or L < 1:
            raise ValueError("need gbar_c > 0 and L >= 1")
        return cls("iid", gbar_c=float(gbar_c), L=int(L))

    @classmethod
    def dissimilar(cls, gbars: Sequence[float]) -> "SnrPdf":
        return cls("dissimilar", gbars=tuple(_check_distinct(gbars)))

    @classmethod
    def for_profile(cls, ebno: float, profile: ChannelProfile) -> "SnrPdf":
        """Dispatch on the path gains: equal gains -> iid, distinct -> dissimilar."""
        gains = profile.gains[profile.gains > 0]
        if len(gains) == 0:
            raise ValueError("profile has no path with positive gain")
        if np.allclose(gains, gains[0], rtol=1e-12, atol=0.0):
            return cls.iid(ebno * gains[0], len(gains))
        if len(np.unique(gains)) != len(gains):
            raise ValueError("mixed equal and distinct path gains are not supported")
        return cls.dissimilar(ebno * gains)

    @classmethod
    def empirical(cls, hist: EnergyHistogram, ebno: float) -> "SnrPdf":
        """Energy histogram mapped to SNR with the mean energy anchored at ``ebno``.

        Scaling cancels M/(M-1): ``gamma_n = ebno * E_n / mean(E)``.
        """
        mean = hist.mean
        if not mean > 0:
            raise ValueError("histogram mean energy must be positive")
        return cls("empirical", support=ebno * (hist.bin_centers / mean), weights=np.asarray(hist.probabilities))

    @property
    def mean(self) -> float:
        if self.kind == "iid":
            return self.gbar_c * self.L
        if self.kind == "dissimilar":
            return float(sum(self.gbars))
        return float(np.dot(self.support, self.weights))

    def pdf(self, gamma):
        if self.kind == "iid":
            return snr_pdf_iid(gamma, self.gbar_c, self.L)
        if self.kind == "dissimilar":
            return snr_pdf_dissimilar(gamma, self.gbars)
        raise TypeError("empirical distribution has point masses, use .weights")

    def cdf(self, gamma):
        if self.kind == "iid":
            return snr_cdf_iid(gamma, self.gbar_c, self.L)
        if self.kind == "dissimilar":
            return snr_cdf_dissimilar(gamma, self.gbars)
        return np.asarray([self.weights[self.support <= g].sum() for g in np.atleast_1d(gamma)])

    def grid(self, n_nodes: int = QUAD_NODES) -> tuple[np.ndarray, np.ndarray]:
        """Evaluation grid ``(gamma, f(gamma))`` over the supported range."""
        if self.kind == "empirical":
            return self.support, self.weights
        g = self.mean * np.logspace(math.log10(QUAD_LO), math.log10(QUAD_HI), n_nodes)
        return g, self.pdf(g)

    def average(self, fn, n_nodes: int = QUAD_NODES) -> float:
        """Expectation of ``fn(gamma)`` under this distribution.

        Continuous kinds use a composite trapezoid on a log-spaced grid over
        ``[1e-6, 50] * mean``; below the grid ``fn`` is taken as its value at
        the first node times the missing probability mass.
        """
        g, w = self.grid(n_nodes)
        if self.kind == "empirical":
            return float(np.dot(fn(g), w))
        vals = fn(g)
        return float(integrate.trapezoid(vals * w, g) + vals[0] * float(self.cdf(g[0])))


def ber_rayleigh(ebno_db: float, M: int, beta: int, profile: ChannelProfile,
                 n_nodes: int = QUAD_NODES, cross_term_factor: float = 1.0) -> float:
    """BER averaged over slow multipath Rayleigh fading (no ISI)."""
    ebno = float(db_to_linear(ebno_db))
    if not ebno > 0:
        raise ValueError("Eb/N0 must be positive")
    dist = SnrPdf.for_profile(ebno, profile)
    return dist.average(lambda g: ber_conditional(g, M, beta, cross_term_factor), n_nodes)


def ber_awgn_low_sf(ebno_db: float, M: int, beta: int, hist: EnergyHistogram,
                    cross_term_factor: float = 1.0) -> float:
    """AWGN BER averaged over the empirical chaotic bit-energy distribution.

    Each class contributes its conditional BER weighted by its probability
    mass; N0 is set so that the mean bit energy sits at the nominal Eb/N0.
    """
    if hist.beta != beta:
        raise ValueError(f"histogram was built for beta={hist.beta}, not {beta}")
    ebno = float(db_to_linear(ebno_db))
    dist = SnrPdf.empirical(hist, ebno)
    mask = dist.weights > 0
    return float(np.dot(ber_conditional(dist.support[mask], M, beta, cross_term_factor), dist.weights[mask]))


# -- curves ------------------------------------------------------------------

METHODS = ("awgn_high_sf", "awgn_low_sf", "rayleigh_integral", "monte_carlo", "bpsk")


@dataclass(frozen=True)
class BerPoint:
    ebno_db: float
    ber: float
    method: str
    M: int
    beta: int
    profile_id: str = "awgn"


def analytic_curve(ebno_db: Iterable[float], M: int, beta: int, method: str,
                   profile: ChannelProfile | None = None, hist: EnergyHistogram | None = None,
                   profile_id: str = "awgn", cross_term_factor: float = 1.0) -> list[BerPoint]:
    points = []
    for e in ebno_db:
        if method == "awgn_high_sf":
            ber = ber_awgn_high_sf(e, M, beta, cross_term_factor)
        elif method == "awgn_low_sf":
            ber = ber_awgn_low_sf(e, M, beta, hist, cross_term_factor)
        elif method == "rayleigh_integral":
            ber = ber_rayleigh(e, M, beta, profile, cross_term_factor=cross_term_factor)
        elif method == "bpsk":
            ber = ber_bpsk_reference(e)
        else:
            raise ValueError(f"unknown analytic method {method!r}")
        points.append(BerPoint(float(e), float(ber), method, M, beta, profile_id))
    return points


ANALYTIC_HEADER = ["ebno_db", "ber", "method", "M", "beta", "profile_id"]


def write_analytic_csv(points: Iterable[BerPoint], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ANALYTIC_HEADER)
        for p in points:
            writer.writerow([p.ebno_db, repr(p.ber), p.method, p.M, p.beta, p.profile_id])
