"""Small versions of the SNR and IRS-distance sweeps, averaged over a few trials.

The command-line tool runs the full-size versions, e.g.
``nfirs snr-sweep --out snr.csv --trials 50``.

Run with ``python3 demos/04_sweeps.py``.
"""
from nfirs.config import ScenarioConfig
from nfirs.experiments import run_distance_sweep, run_snr_sweep

config = ScenarioConfig(n_trials=5)

rows = run_snr_sweep(config, [10.0, 20.0, 30.0],
                     ["fd_irs_10", "fd_irs_30", "fd_100x50", "hd_100x50"])
print("average WSR [bits/s/Hz] versus SNR")
print(f"{'scheme':>10} " + " ".join(f"{s:>7.0f}dB" for s in (10, 20, 30)))
for scheme in ("fd_irs_10", "fd_irs_30", "fd_100x50", "hd_100x50"):
    vals = [r.wsr_bits for r in rows if r.scheme == scheme and r.trial == "mean"]
    print(f"{scheme:>10} " + " ".join(f"{v:9.1f}" for v in vals))

grid = [3.0, 10.0, 20.0, 40.0, 60.0, 90.0]
rows = run_distance_sweep(config, grid, ["fd_irs_10"], snr_db=30.0)
print("\naverage WSR at 30 dB versus IRS standoff (10x10 IRSs)")
for r in rows:
    if r.trial == "mean":
        print(f"{r.distance_m:5.0f} m  {r.wsr_bits:7.1f}")
