"""Channel sampling: clustered far-field, Rician self-interference and
spherical-wavefront near-field channels, plus a plain-text dump format."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import LINKS, LinkGeometry, beta_scale, steering_vector

__all__ = [
    "ClusterParams",
    "ChannelSet",
    "DegenerateGeometryError",
    "IRS_LINKS",
    "NF_LINKS",
    "SI_LINKS",
    "sample_ff_channel",
    "nf_los_channel",
    "sample_si_channel",
    "build_channel_set",
    "dump_channel_set",
    "load_channel_set",
]

NF_LINKS = (("il", "l"), ("l", "il"), ("ir", "r"), ("r", "ir"))
SI_LINKS = (("l", "l"), ("r", "r"))
IRS_LINKS = tuple(link for link in LINKS if "il" in link or "ir" in link)

# Stable sub-stream index per link; append new links at the end only.
_STREAM_INDEX = {link: k for k, link in enumerate(LINKS)}


class DegenerateGeometryError(ValueError):
    """A transmit and a receive element coincide."""


@dataclass(frozen=True)
class ClusterParams:
    """Clustered channel statistics.

    ``angle_range`` bounds the per-cluster AoA/AoD draws (radians);
    ``ray_jitter`` is the half-width of the uniform per-ray offset around the
    cluster angle.
    """

    n_clusters: int = 3
    n_rays: int = 3
    angle_range: tuple[float, float] = (-np.pi / 6, np.pi / 6)
    rician_kappa: float = 1.0
    ray_jitter: float = float(np.deg2rad(2.0))

    def __post_init__(self):
        if self.n_clusters < 1 or self.n_rays < 1:
            raise ValueError("n_clusters and n_rays must be >= 1")
        if self.rician_kappa < 0:
            raise ValueError("rician_kappa must be nonnegative")


def _ray_angles(params: ClusterParams, rng: np.random.Generator) -> np.ndarray:
    lo, hi = params.angle_range
    centers = rng.uniform(lo, hi, size=params.n_clusters)
    jitter = rng.uniform(-params.ray_jitter, params.ray_jitter,
                         size=(params.n_clusters, params.n_rays))
    return (centers[:, None] + jitter).ravel()


def sample_ff_channel(rows: int, cols: int, beta: float, params: ClusterParams,
                      rng: np.random.Generator) -> np.ndarray:
    """Draw one clustered far-field channel of shape ``(rows, cols)``.

    The ``n_clusters * n_rays`` paths carry CN(0, 1) gains and unit-norm
    array responses, so that ``E ||H||_F^2 = beta * rows * cols``.
    """
    n_paths = params.n_clusters * params.n_rays
    aoa = _ray_angles(params, rng)
    aod = _ray_angles(params, rng)
    alpha = (rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)) / np.sqrt(2)
    a_rx = np.stack([steering_vector(t, rows) for t in aoa], axis=1) / np.sqrt(rows)
    a_tx = np.stack([steering_vector(t, cols) for t in aod], axis=1) / np.sqrt(cols)
    scale = np.sqrt(beta) * np.sqrt(rows * cols / n_paths)
    return scale * (a_rx * alpha[None, :]) @ a_tx.T


def nf_los_channel(rx_positions: np.ndarray, tx_positions: np.ndarray,
                   wavelength: float) -> np.ndarray:
    """Spherical-wavefront LoS channel ``rho / d * exp(-2j*pi*d/lambda)``.

    ``rho`` is chosen so that ``||H||_F^2`` equals ``rows * cols`` exactly.
    """
    rx = np.atleast_2d(np.asarray(rx_positions, dtype=float))
    tx = np.atleast_2d(np.asarray(tx_positions, dtype=float))
    d = np.linalg.norm(rx[:, None, :] - tx[None, :, :], axis=-1)
    if np.any(d <= 1e-12):
        raise DegenerateGeometryError("coincident transmit and receive elements")
    rho = np.sqrt(d.size / np.sum(1.0 / d**2))
    return rho / d * np.exp(-2j * np.pi * d / wavelength)


def sample_si_channel(geometry: LinkGeometry, node: str, params: ClusterParams,
                      rng: np.random.Generator) -> np.ndarray:
    """Rician self-interference channel of node ``"l"`` or ``"r"``."""
    rx = geometry.positions(node, "rx")
    tx = geometry.positions(node, "tx")
    beta = beta_scale(geometry, (node, node))
    los = nf_los_channel(rx, tx, geometry.wavelength)
    ref = sample_ff_channel(rx.shape[0], tx.shape[0], 1.0, params, rng)
    kappa = params.rician_kappa
    if np.isinf(kappa):
        w_los, w_ref = 1.0, 0.0
    else:
        w_los, w_ref = np.sqrt(kappa / (kappa + 1)), np.sqrt(1 / (kappa + 1))
    return np.sqrt(beta) * (w_los * los + w_ref * ref)


@dataclass
class ChannelSet:
    """The fourteen channel matrices, keyed by ``(rx, tx)`` entity labels."""

    matrices: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        missing = [link for link in LINKS if link not in self.matrices]
        if missing:
            raise ValueError(f"channel set is missing links {missing}")
        dims = {}
        for (rx, tx), h in self.matrices.items():
            for ent, role, n in ((rx, "rx", h.shape[0]), (tx, "tx", h.shape[1])):
                key = (ent, role) if ent in ("l", "r") else (ent, "any")
                if dims.setdefault(key, n) != n:
                    raise ValueError(f"inconsistent element count for {ent} ({role})")
        self._dims = dims

    def __getitem__(self, link: tuple[str, str]) -> np.ndarray:
        return self.matrices[link]

    def n_elements(self, entity: str, role: str = "any") -> int:
        if entity in ("il", "ir"):
            role = "any"
        return self._dims[(entity, role)]

    def replace(self, **updates) -> "ChannelSet":
        """Copy with some links swapped; keys like ``l_r`` name link ``(l, r)``."""
        mats = dict(self.matrices)
        for key, value in updates.items():
            link = tuple(key.split("_"))
            if link not in mats:
                raise KeyError(key)
            mats[link] = np.asarray(value)
        return ChannelSet(mats)

    def without_irs(self) -> "ChannelSet":
        """All IRS-involving channels set to zero."""
        mats = {k: (np.zeros_like(v) if k in IRS_LINKS else v) for k, v in self.matrices.items()}
        return ChannelSet(mats)

    def without_si(self) -> "ChannelSet":
        mats = {k: (np.zeros_like(v) if k in SI_LINKS else v) for k, v in self.matrices.items()}
        return ChannelSet(mats)

    def relabeled(self) -> "ChannelSet":
        """Swap the roles of nodes l and r (and of their IRSs)."""
        swap = {"l": "r", "r": "l", "il": "ir", "ir": "il"}
        return ChannelSet({(swap[rx], swap[tx]): h for (rx, tx), h in self.matrices.items()})


def _substream(seed, link: tuple[str, str]) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        entropy = seed.entropy
    else:
        entropy = int(seed)
    return np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=(_STREAM_INDEX[link],)))


def build_channel_set(geometry: LinkGeometry, params: ClusterParams,
                      seed: int | np.random.SeedSequence) -> ChannelSet:
    """Sample every channel of the link for one Monte-Carlo trial.

    Each link draws from its own sub-stream of ``seed``, so a given link's
    realization does not depend on which other links are sampled.

    Near-field IRS links are deterministic spherical-wavefront matrices scaled
    by their distance gain; the SI links are Rician; everything else is
    clustered far-field. ``H_{il,ir}`` is the transpose of ``H_{ir,il}``.
    """
    mats: dict[tuple[str, str], np.ndarray] = {}
    for link in NF_LINKS:
        rx, tx = link
        h = nf_los_channel(geometry.positions(rx, "rx"), geometry.positions(tx, "tx"),
                           geometry.wavelength)
        mats[link] = np.sqrt(beta_scale(geometry, link)) * h
    for node in ("l", "r"):
        mats[(node, node)] = sample_si_channel(geometry, node, params,
                                               _substream(seed, (node, node)))
    for link in LINKS:
        if link in mats or link == ("il", "ir"):
            continue
        rx, tx = link
        mats[link] = sample_ff_channel(
            geometry.n_elements(rx, "rx"), geometry.n_elements(tx, "tx"),
            beta_scale(geometry, link), params, _substream(seed, link))
    mats[("il", "ir")] = mats[("ir", "il")].T
    return ChannelSet(mats)


_HEADER = re.compile(r"^# link=(\w+),(\w+) rows=(\d+) cols=(\d+)$")


def dump_channel_set(channels: ChannelSet, path) -> None:
    """Write every matrix as a header line plus rows of interleaved re/im pairs."""
    lines = []
    for link in LINKS:
        h = channels[link]
        lines.append(f"# link={link[0]},{link[1]} rows={h.shape[0]} cols={h.shape[1]}")
        for row in h:
            pairs = np.column_stack([row.real, row.imag]).ravel()
            lines.append(" ".join(repr(float(v)) for v in pairs))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_channel_set(path) -> ChannelSet:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    mats = {}
    k = 0
    while k < len(lines):
        m = _HEADER.match(lines[k].strip())
        if m is None:
            raise ValueError(f"{path}:{k + 1}: expected a link header")
        rx, tx, rows, cols = m.group(1), m.group(2), int(m.group(3)), int(m.group(4))
        block = np.array([[float(v) for v in lines[k + 1 + i].split()] for i in range(rows)])
        if block.shape != (rows, 2 * cols):
            raise ValueError(f"{path}:{k + 1}: block for {rx},{tx} has shape {block.shape}")
        mats[(rx, tx)] = block[:, 0::2] + 1j * block[:, 1::2]
        k += 1 + rows
    return ChannelSet(mats)
