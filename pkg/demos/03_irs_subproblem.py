"""Build the quadratic program for one IRS and run the MM iterations on it.

With precoders, combiners and weights fixed, the weighted MSE is a quadratic
function of one IRS's phase vector. This script shows how stiff that function
gets as the SNR grows: the MM step size is roughly |gradient| / lambda_max.

Run with ``python3 demos/03_irs_subproblem.py``.
"""
import numpy as np

from nfirs.channels import build_channel_set
from nfirs.config import ScenarioConfig
from nfirs.effective import IrsPhases, compose_effective
from nfirs.geometry import build_geometry
from nfirs.irs_mm import build_quadratic_form, optimize_irs
from nfirs.wmmse import initial_precoder, receiver_stats

for snr_db in (0.0, 15.0, 30.0):
    config = ScenarioConfig().with_snr(snr_db)
    channels = build_channel_set(build_geometry(config), config.cluster, seed=0)
    phases = IrsPhases.identity(100, 100)
    eff = compose_effective(channels, phases)
    V_l = initial_precoder(eff[("r", "l")], 2, config.p_l)
    V_r = initial_precoder(eff[("l", "r")], 2, config.p_r)
    stats = {node: receiver_stats(eff, V_l, V_r, node) for node in ("l", "r")}
    F = {node: s.combiner() for node, s in stats.items()}
    W = {node: s.weight(1.0) for node, s in stats.items()}
    E = {node: s.error_covariance() for node, s in stats.items()}

    form = build_quadratic_form(channels, phases["ir"], V_l, V_r, F["l"], F["r"], W["l"],
                                W["r"], "il", phase=phases["il"], E_l=E["l"], E_r=E["r"])
    result = optimize_irs(form, phases["il"], eps=1e-4, max_iters=50)
    moved = np.max(np.abs(np.angle(result.phi)))
    print(f"SNR {snr_db:4.0f} dB: lambda_max {form.lambda_max:9.2e}, "
          f"|gradient| {np.linalg.norm(form.gradient):9.2e}, "
          f"objective {result.objective[0]:.6g} -> {result.objective[-1]:.6g} "
          f"in {result.iterations} steps, largest phase change {moved:.2e} rad")

# Sigma is a sum of Hadamard products of low-rank factors, so most of its
# eigenvalues vanish. The majorizer uses lambda_max in every direction.
eigs = np.linalg.eigvalsh(form.sigma)
print()
print(f"rank of Sigma at 30 dB: {np.sum(eigs > 1e-9 * eigs[-1])} of {eigs.size}")
