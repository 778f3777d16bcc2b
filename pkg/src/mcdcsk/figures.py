"""CSV reproduction recipes for every published experiment.

Each recipe writes simulated and analytic series side by side, preceded by
``#`` provenance lines (recipe, parameter hash, seed, version).
"""

from __future__ import annotations

import csv
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis as an
from .chaos import estimate_energy_histogram
from .channel import ChannelProfile
from .config import provenance
from .frame import SystemConfig, spreading_factor
from .montecarlo import RunSpec, run_monte_carlo, sweep_beta, sweep_delay

#: (M, beta) pairs of the T_b=400, B=1, alpha=0.25 design
AWGN_CONFIGS = tuple((M, spreading_factor(400, 1, M, 0.25)) for M in (64, 16, 8, 2))
LOW_SF_LIMIT = 10  # below this beta the energy histogram replaces the constant-energy form
RAYLEIGH_PROFILES = {
    "l2": ChannelProfile.rayleigh([0.5, 0.5], [0, 2]),
    "l3": ChannelProfile.rayleigh([4 / 7, 2 / 7, 1 / 7], [0, 3, 6]),
}


def _write(path: Path, header_lines, columns, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(columns)
        w.writerows(rows)
    return path


def awgn_analytic(M: int, beta: int, hist_samples: int = 10_000_000, seed: int = 0):
    """Analytic AWGN curve matching the spreading regime: histogram at low beta."""
    if beta < LOW_SF_LIMIT:
        hist = estimate_energy_histogram(beta, n_samples=hist_samples, rng_seed=seed)
        return lambda e: (an.ber_awgn_low_sf(e, M, beta, hist), "awgn_low_sf")
    return lambda e: (an.ber_awgn_high_sf(e, M, beta), "awgn_high_sf")


def _mc_rows(curve, label):
    for p in curve.points:
        lo, hi = p.ci
        ab, am = curve.analytic.get(p.ebno_db, ("", ""))
        yield [label, curve.M, curve.beta, p.ebno_db, p.errors, p.bits, p.ber, lo, hi, ab, am]


MC_COLUMNS = ["series", "M", "beta", "ebno_db", "errors", "bits", "ber", "ci_low", "ci_high",
              "analytic_ber", "analytic_method"]


def fig_dbr(out: Path, M_max: int = 64, **_):
    params = {"M_max": M_max}
    rows = [[M, an.dbr(M), an.reference_share(M)] for M in range(2, M_max + 1)]
    return [_write(out / "dbr.csv", provenance("dbr", params, "-"), ["M", "dbr", "reference_share"], rows)]


def fig_energy_histogram(out: Path, beta: int = 20, n_samples: int = 10_000_000, seed: int = 0, **_):
    params = {"beta": beta, "n_samples": n_samples, "classes": 100}
    hist = estimate_energy_histogram(beta, n_samples=n_samples, rng_seed=seed)
    rows = zip(hist.bin_centers, hist.probabilities)
    return [_write(out / f"energy_histogram_beta{beta}.csv", provenance("energy-histogram", params, seed),
                   ["bin_center", "probability"], rows)]


def fig_awgn(out: Path, seed: int = 0, max_bits: int = 20_000_000, min_errors: int = 200,
             ebno=tuple(range(5, 15)), workers: int = 1, **_):
    params = {"configs": AWGN_CONFIGS, "ebno": list(ebno), "max_bits": max_bits, "min_errors": min_errors}
    rows = []
    for M, beta in AWGN_CONFIGS:
        spec = RunSpec(SystemConfig(M, beta), ebno_db=tuple(ebno), min_errors=min_errors,
                       max_bits=max_bits, master_seed=seed, workers=workers)
        rows += _mc_rows(run_monte_carlo(spec, awgn_analytic(M, beta, seed=seed)), f"M{M}")
    return [_write(out / "awgn.csv", provenance("awgn", params, seed), MC_COLUMNS, rows)]


def fig_dcsk_vs_mc(out: Path, seed: int = 0, max_bits: int = 20_000_000, min_errors: int = 200,
                   ebno=tuple(range(0, 15)), beta: int = 5, workers: int = 1, **_):
    params = {"M": [2, 64], "beta": beta, "ebno": list(ebno), "max_bits": max_bits}
    rows = []
    for M in (2, 64):
        spec = RunSpec(SystemConfig(M, beta), ebno_db=tuple(ebno), min_errors=min_errors,
                       max_bits=max_bits, master_seed=seed, workers=workers)
        rows += _mc_rows(run_monte_carlo(spec, awgn_analytic(M, beta, seed=seed)), f"M{M}")
    rows += [["bpsk", "", "", e, "", "", an.ber_bpsk_reference(e), "", "", "", "bpsk"] for e in ebno]
    return [_write(out / "dcsk_vs_mc.csv", provenance("dcsk-vs-mc", params, seed), MC_COLUMNS, rows)]


BETA_SWEEP = (1, 2, 3, 4, 5, 6, 8, 10, 15, 20, 30, 40, 50, 80, 160)
BETA_SWEEP_EBNO = 16.0


def fig_beta_sweep(out: Path, seed: int = 0, max_bits: int = 20_000_000, min_errors: int = 200,
                   ebno: float = BETA_SWEEP_EBNO, betas=BETA_SWEEP, workers: int = 1, **_):
    params = {"M": 2, "betas": list(betas), "ebno": ebno, "max_bits": max_bits}
    tmpl = RunSpec(SystemConfig(2, 1), min_errors=min_errors, max_bits=max_bits, master_seed=seed, workers=workers)
    res = sweep_beta(tmpl, betas, ebno)
    rows = []
    for b, p in zip(res.values, res.points):
        lo, hi = p.ci
        rows.append([b, p.errors, p.bits, p.ber, lo, hi, an.ber_awgn_high_sf(ebno, 2, b)])
    lines = provenance("beta-sweep", params, seed) + [f"argmin_beta: {res.argmin}"]
    return [_write(out / "beta_sweep.csv", lines,
                   ["beta", "errors", "bits", "ber", "ci_low", "ci_high", "analytic_ber"], rows)]


def fig_rayleigh(out: Path, which: str = "l2", seed: int = 0, max_bits: int = 20_000_000,
                 min_errors: int = 200, ebno=tuple(range(0, 31, 2)), beta: int = 80, workers: int = 1, **_):
    profile = RAYLEIGH_PROFILES[which]
    params = {"profile": profile.to_dict(), "M": [2, 64], "beta": beta, "ebno": list(ebno), "max_bits": max_bits}
    rows = []
    for M in (2, 64):
        spec = RunSpec(SystemConfig(M, beta), profile=profile, ebno_db=tuple(ebno), min_errors=min_errors,
                       max_bits=max_bits, master_seed=seed, workers=workers)
        curve = run_monte_carlo(spec, lambda e, M=M: (an.ber_rayleigh(e, M, beta, profile), "rayleigh_integral"))
        rows += _mc_rows(curve, f"M{M}")
    return [_write(out / f"rayleigh_{which}.csv", provenance(f"rayleigh-{which}", params, seed), MC_COLUMNS, rows)]


DELAY_SWEEP = (1, 2, 4, 6, 8, 10, 12, 16, 20, 30, 40, 50, 60, 70, 79)


def fig_delay_sweep(out: Path, seed: int = 0, max_bits: int = 20_000_000, min_errors: int = 200,
                    tau2=DELAY_SWEEP, ebno: float = 15.0, workers: int = 1, **_):
    M, beta = 64, 80
    params = {"M": M, "beta": beta, "ebno": ebno, "tau2": list(tau2), "max_bits": max_bits}
    tmpl = RunSpec(SystemConfig(M, beta), min_errors=min_errors, max_bits=max_bits, master_seed=seed, workers=workers)
    res = sweep_delay(tmpl, tau2, ebno, analytic=lambda prof: an.ber_rayleigh(ebno, M, beta, prof))
    rows = []
    for t, p, a in zip(res.values, res.points, res.analytic):
        lo, hi = p.ci
        rows.append([t, t + 1, p.errors, p.bits, p.ber, lo, hi, a])
    return [_write(out / "delay_sweep.csv", provenance("delay-sweep", params, seed),
                   ["tau2", "tau3", "errors", "bits", "ber", "ci_low", "ci_high", "analytic_ber"], rows)]


RECIPES = {
    "dbr": fig_dbr,
    "energy-histogram": fig_energy_histogram,
    "awgn": fig_awgn,
    "dcsk-vs-mc": fig_dcsk_vs_mc,
    "beta-sweep": fig_beta_sweep,
    "rayleigh-l2": lambda out, **kw: fig_rayleigh(out, "l2", **kw),
    "rayleigh-l3": lambda out, **kw: fig_rayleigh(out, "l3", **kw),
    "delay-sweep": fig_delay_sweep,
}


def emit_figure(name: str, out_dir, **kwargs) -> list:
    if name not in RECIPES:
        raise KeyError(f"unknown recipe {name!r}; choose from {', '.join(RECIPES)}")
    return RECIPES[name](Path(out_dir), **kwargs)
