"""Solve one channel draw with and without IRSs and compare the baselines.

Run with ``python3 demos/02_single_trial.py``.
"""
import numpy as np

from nfirs.channels import build_channel_set
from nfirs.config import ScenarioConfig
from nfirs.experiments import scheme_config
from nfirs.geometry import build_geometry
from nfirs.solver import solve_fd_irs, solve_fd_no_irs, solve_hd

config = ScenarioConfig().with_snr(30.0)
channels = build_channel_set(build_geometry(config), config.cluster, seed=1)

report = solve_fd_irs(channels, config)
print(f"FD with 10x10 IRSs: {report.final_wsr:.2f} bits/s/Hz after "
      f"{report.outer_iterations} outer iterations (converged: {report.converged})")
print("trajectory:", np.round(report.wsr_trajectory, 4))

# The same antennas without the IRSs, and without the IRSs and the second
# direction's resource (half duplex).
print(f"FD, IRSs ignored:   {solve_fd_no_irs(channels, config).final_wsr:.2f}")
print(f"HD, IRSs ignored:   {solve_hd(channels, config).final_wsr:.2f}")

# Massive-MIMO baselines with 100 tx and 50 rx antennas per node.
big = scheme_config(config, "fd_100x50")
big_channels = build_channel_set(build_geometry(big), big.cluster, seed=1)
print(f"FD-100x50:          {solve_fd_no_irs(big_channels, big).final_wsr:.2f}")
print(f"HD-100x50:          {solve_hd(big_channels, big).final_wsr:.2f}")

# A smaller, lower-SNR link where the phase updates visibly pay off.
small = ScenarioConfig(M_l=4, M_r=4, N_l=3, N_r=3, irs_l_dims=(2, 3), irs_r_dims=(2, 3),
                       p_l=10.0, p_r=10.0)
small_report = solve_fd_irs(build_channel_set(build_geometry(small), small.cluster, 7), small)
print("\nsmall link trajectory:", np.round(small_report.wsr_trajectory[:6], 3), "...",
      round(small_report.final_wsr, 3))
print("final IRS l phases [deg]:", np.round(np.degrees(np.angle(small_report.final_phases.phi_l))))
