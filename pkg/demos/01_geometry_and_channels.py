"""Lay out the link, sample one channel realization and look at its gains.

Run with ``python3 demos/01_geometry_and_channels.py``.
"""
import numpy as np

from nfirs.channels import build_channel_set
from nfirs.config import ScenarioConfig
from nfirs.geometry import LINKS, beta_scale, build_geometry, link_distance

config = ScenarioConfig()
geometry = build_geometry(config)

# Node l transmits from the origin, node r from 200 m up the y axis.
# Each IRS sits 3 m in front of its node.
print("node l tx, first element:", geometry.positions("l", "tx")[0])
print("IRS l, first element:    ", geometry.positions("il", "tx")[0])
print("IRS r, first element:    ", geometry.positions("ir", "tx")[0])

# Every link gets an amplitude gain sqrt(D_lr / D_mn): 1 for the direct link,
# large for the node-to-own-IRS and self-interference links.
print(f"\n{'link':>8} {'distance [m]':>13} {'beta':>9}")
for link in LINKS:
    print(f"{','.join(link):>8} {link_distance(geometry, link):13.3f} "
          f"{beta_scale(geometry, link):9.2f}")

channels = build_channel_set(geometry, config.cluster, seed=0)

# Energy per entry, relative to unit-gain entries.
print(f"\n{'link':>8} {'shape':>10} {'||H||^2 / (rows*cols)':>24}")
for link in LINKS:
    h = channels[link]
    print(f"{','.join(link):>8} {str(h.shape):>10} {np.linalg.norm(h)**2 / h.size:24.2f}")

# The two IRSs see each other through reciprocal channels.
print("\nreciprocal IRS-IRS channels:",
      np.array_equal(channels[("il", "ir")], channels[("ir", "il")].T))
