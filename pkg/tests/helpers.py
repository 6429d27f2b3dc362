"""Random instances shared by the test modules."""

import numpy as np

from nfirs.channels import ChannelSet
from nfirs.geometry import LINKS


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_channel_set(rng, M=(2, 2), N=(2, 2), n_irs=(2, 2), scale=1.0) -> ChannelSet:
    """Gaussian matrices for every link; ``M``/``N`` are (l, r) tx/rx counts."""
    rows = {"l": N[0], "r": N[1], "il": n_irs[0], "ir": n_irs[1]}
    cols = {"l": M[0], "r": M[1], "il": n_irs[0], "ir": n_irs[1]}
    mats = {link: scale * crandn(rng, rows[link[0]], cols[link[1]]) for link in LINKS}
    mats[("il", "ir")] = mats[("ir", "il")].T
    return ChannelSet(mats)


def random_phases(rng, n):
    return np.exp(2j * np.pi * rng.random(n))
