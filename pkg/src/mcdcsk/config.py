"""YAML run configuration and CSV provenance headers."""

from __future__ import annotations

import hashlib
import json
import subprocess
from pathlib import Path

import numpy as np
import yaml

from .channel import ChannelProfile
from .frame import ConfigurationError, SystemConfig
from .montecarlo import DEFAULT_MAX_BITS, DEFAULT_MIN_ERRORS, RunSpec


def load_yaml(path) -> dict:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: expected a mapping at top level")
    return data


def load_profile(path) -> ChannelProfile:
    data = load_yaml(path)
    return ChannelProfile.from_dict(data.get("channel", data))


def ebno_grid(start: float, stop: float, step: float) -> tuple:
    if step <= 0:
        raise ConfigurationError("Eb/N0 step must be positive")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    if n < 1:
        raise ConfigurationError("empty Eb/N0 grid")
    return tuple(round(start + i * step, 10) for i in range(n))


def system_from_mapping(d: dict) -> SystemConfig:
    alpha = float(d.get("alpha", 0.25))
    if d.get("beta") is not None:
        return SystemConfig(M=int(d["M"]), beta=int(d["beta"]), alpha=alpha)
    if d.get("T_b") is not None and d.get("B") is not None:
        return SystemConfig.from_band(float(d["T_b"]), float(d["B"]), int(d["M"]), alpha)
    raise ConfigurationError("give either beta or both T_b and B")


def runspec_from_mapping(d: dict) -> RunSpec:
    """Build a RunSpec from a config mapping.

    Keys: ``M``, ``beta`` (or ``T_b``/``B``/``alpha``), ``ebno_db`` (list or
    ``{start, stop, step}``), ``channel`` (``fading`` + ``paths``),
    ``min_errors``, ``max_bits``, ``seed``, ``workers``, ``noiseless``.
    """
    if "M" not in d:
        raise ConfigurationError("config needs M")
    grid = d.get("ebno_db", [10.0])
    if isinstance(grid, dict):
        grid = ebno_grid(float(grid["start"]), float(grid["stop"]), float(grid.get("step", 1.0)))
    try:
        return RunSpec(
            config=system_from_mapping(d),
            profile=ChannelProfile.from_dict(d.get("channel", {})),
            ebno_db=tuple(float(e) for e in np.atleast_1d(grid)),
            min_errors=int(d.get("min_errors", DEFAULT_MIN_ERRORS)),
            max_bits=int(d.get("max_bits", DEFAULT_MAX_BITS)),
            master_seed=int(d.get("seed", 0)),
            workers=int(d.get("workers", 1)),
            noiseless=bool(d.get("noiseless", False)),
        )
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from exc


def runspec_to_mapping(spec: RunSpec) -> dict:
    return {
        "M": spec.config.M,
        "beta": spec.config.beta,
        "alpha": spec.config.alpha,
        "ebno_db": list(spec.ebno_db),
        "channel": spec.profile.to_dict(),
        "min_errors": spec.min_errors,
        "max_bits": spec.max_bits,
        "seed": spec.master_seed,
        "workers": spec.workers,
        "noiseless": spec.noiseless,
    }


def spec_hash(params: dict) -> str:
    blob = json.dumps(params, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def version_string() -> str:
    from . import __version__

    try:
        sha = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        sha = ""
    return f"{__version__}+g{sha}" if sha else __version__


def provenance(recipe: str, params: dict, seed) -> list:
    return [
        f"recipe: {recipe}",
        f"spec_hash: {spec_hash(params)}",
        f"seed: {seed}",
        f"version: mcdcsk {version_string()}",
        f"params: {json.dumps(params, sort_keys=True, default=str)}",
    ]
