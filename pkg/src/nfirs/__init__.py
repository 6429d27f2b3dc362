"""Joint WMMSE beamforming and IRS phase design for a full-duplex mmWave link
assisted by two near-field IRSs."""

from .channels import ChannelSet, ClusterParams, build_channel_set
from .config import ScenarioConfig, parse_config
from .effective import EffectiveChannels, IrsPhases, compose_effective
from .experiments import run_distance_sweep, run_snr_sweep
from .geometry import build_geometry
from .solver import SolveReport, solve_fd_irs, solve_fd_no_irs, solve_hd

__all__ = [
    "ChannelSet",
    "ClusterParams",
    "EffectiveChannels",
    "IrsPhases",
    "ScenarioConfig",
    "SolveReport",
    "build_channel_set",
    "build_geometry",
    "compose_effective",
    "parse_config",
    "run_distance_sweep",
    "run_snr_sweep",
    "solve_fd_irs",
    "solve_fd_no_irs",
    "solve_hd",
]
