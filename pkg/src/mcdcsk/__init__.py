"""Multi-carrier DCSK baseband simulator and BER analysis."""

from .chaos import (
    ChaoticSequence,
    EnergyHistogram,
    cpf_next,
    estimate_energy_histogram,
    generate_sequence,
)
from .channel import ChannelProfile, FadingDraw, Path, apply_channel, awgn_only, draw_fading
from .frame import (
    ConfigurationError,
    FrameMatrices,
    SubcarrierPlan,
    SystemConfig,
    build_dcsk_serial,
    build_mc_frame,
    frequency_plan,
    spreading_factor,
)
from .receiver import ReceiverOutput, decision_stats, demodulate

__version__ = "0.1.0"

__all__ = [
    "ChannelProfile",
    "ChaoticSequence",
    "ConfigurationError",
    "EnergyHistogram",
    "FadingDraw",
    "FrameMatrices",
    "Path",
    "ReceiverOutput",
    "SubcarrierPlan",
    "SystemConfig",
    "apply_channel",
    "awgn_only",
    "build_dcsk_serial",
    "build_mc_frame",
    "cpf_next",
    "decision_stats",
    "demodulate",
    "draw_fading",
    "estimate_energy_histogram",
    "frequency_plan",
    "generate_sequence",
    "spreading_factor",
]
