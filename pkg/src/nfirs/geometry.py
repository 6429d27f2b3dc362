"""Placement of the node arrays and IRS grids, and distance-based channel gains.

Coordinates are in meters. Node ``l`` transmits from a ULA whose first element
sits at the origin, node ``r`` from a ULA whose first element sits at
``(0, D_lr, 0)``. Both ULAs extend along +x. Each node's receive ULA is
``D_b`` away along y, on the side facing the other node, rotated by
``Theta_b`` relative to the transmit array. IRS ``i_l`` / ``i_r`` sit at
standoff ``D_irs`` from their node, rows along +x and columns along +z.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .config import ScenarioConfig

__all__ = [
    "ConfigurationError",
    "LinkGeometry",
    "LINKS",
    "build_geometry",
    "beta_scale",
    "link_distance",
    "steering_vector",
    "ula_positions",
]

# Entity labels: "l"/"r" are the FD nodes, "il"/"ir" their IRSs.
# A link (rx, tx) names the channel matrix H_{rx,tx}.
LINKS: tuple[tuple[str, str], ...] = (
    ("l", "r"),
    ("r", "l"),
    ("l", "l"),
    ("r", "r"),
    ("il", "l"),
    ("l", "il"),
    ("ir", "r"),
    ("r", "ir"),
    ("ir", "l"),
    ("l", "ir"),
    ("il", "r"),
    ("r", "il"),
    ("ir", "il"),
    ("il", "ir"),
)


class ConfigurationError(ValueError):
    """Raised when a scenario cannot be laid out geometrically."""


@dataclass(frozen=True)
class LinkGeometry:
    node_l_tx_positions: np.ndarray
    node_l_rx_positions: np.ndarray
    node_r_tx_positions: np.ndarray
    node_r_rx_positions: np.ndarray
    irs_l_positions: np.ndarray
    irs_r_positions: np.ndarray
    wavelength: float
    inter_node_distance: float
    irs_standoff: float
    array_separation: float
    array_relative_angle: float

    def positions(self, entity: str, role: str) -> np.ndarray:
        """Element positions of ``entity`` acting as receiver (``"rx"``) or
        transmitter (``"tx"``). IRSs use the same grid for both roles."""
        if entity == "il":
            return self.irs_l_positions
        if entity == "ir":
            return self.irs_r_positions
        if entity not in ("l", "r") or role not in ("rx", "tx"):
            raise KeyError(f"unknown endpoint {entity!r}/{role!r}")
        return getattr(self, f"node_{entity}_{role}_positions")

    def center(self, entity: str) -> np.ndarray:
        """Reference center of a node (its transmit array) or an IRS grid."""
        return self.positions(entity, "tx").mean(axis=0)

    def n_elements(self, entity: str, role: str) -> int:
        return self.positions(entity, role).shape[0]


def ula_positions(n: int, start, direction, spacing: float) -> np.ndarray:
    """``n`` points from ``start`` stepping ``spacing`` along ``direction``."""
    start = np.asarray(start, dtype=float)
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    k = np.arange(n, dtype=float)[:, None]
    return start[None, :] + k * spacing * direction[None, :]


def _grid_positions(rows: int, cols: int, y: float, spacing: float) -> np.ndarray:
    # row-major: index = row * cols + col; columns step along x, rows along z
    r, c = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    pts = np.zeros((rows * cols, 3))
    pts[:, 0] = c.ravel() * spacing
    pts[:, 1] = y
    pts[:, 2] = r.ravel() * spacing
    return pts


def _rx_array(n: int, tx: np.ndarray, offset_y: float, angle: float,
              spacing: float) -> np.ndarray:
    center = tx.mean(axis=0) + np.array([0.0, offset_y, 0.0])
    direction = np.array([np.cos(angle), np.sign(offset_y) * np.sin(angle), 0.0])
    k = np.arange(n, dtype=float) - (n - 1) / 2
    return center[None, :] + k[:, None] * spacing * direction[None, :]


def build_geometry(config: "ScenarioConfig") -> LinkGeometry:
    """Lay out both nodes and both IRSs for ``config``.

    Raises
    ------
    ConfigurationError
        If a count is below one, a distance is not positive, or the IRSs
        would cross the link midpoint (``D_irs >= D_lr / 2``).
    """
    counts = {
        "M_l": config.M_l, "M_r": config.M_r, "N_l": config.N_l, "N_r": config.N_r,
        "irs_l_rows": config.irs_l_dims[0], "irs_l_cols": config.irs_l_dims[1],
        "irs_r_rows": config.irs_r_dims[0], "irs_r_cols": config.irs_r_dims[1],
    }
    for name, value in counts.items():
        if int(value) < 1:
            raise ConfigurationError(f"{name} must be >= 1, got {value}")
    for name in ("wavelength", "D_lr", "D_irs", "D_b"):
        if not getattr(config, name) > 0:
            raise ConfigurationError(f"{name} must be positive, got {getattr(config, name)}")
    if config.D_irs >= config.D_lr / 2:
        raise ConfigurationError(
            f"D_irs={config.D_irs} must be below D_lr/2={config.D_lr / 2}"
        )

    h = config.wavelength / 2
    x = (1.0, 0.0, 0.0)
    l_tx = ula_positions(config.M_l, (0.0, 0.0, 0.0), x, h)
    r_tx = ula_positions(config.M_r, (0.0, config.D_lr, 0.0), x, h)
    l_rx = _rx_array(config.N_l, l_tx, config.D_b, config.Theta_b, h)
    r_rx = _rx_array(config.N_r, r_tx, -config.D_b, config.Theta_b, h)
    irs_l = _grid_positions(*config.irs_l_dims, y=config.D_irs, spacing=h)
    irs_r = _grid_positions(*config.irs_r_dims, y=config.D_lr - config.D_irs, spacing=h)

    return LinkGeometry(
        node_l_tx_positions=l_tx,
        node_l_rx_positions=l_rx,
        node_r_tx_positions=r_tx,
        node_r_rx_positions=r_rx,
        irs_l_positions=irs_l,
        irs_r_positions=irs_r,
        wavelength=float(config.wavelength),
        inter_node_distance=float(config.D_lr),
        irs_standoff=float(config.D_irs),
        array_separation=float(config.D_b),
        array_relative_angle=float(config.Theta_b),
    )


def link_distance(geometry: LinkGeometry, link: tuple[str, str]) -> float:
    """Center-to-center distance used for the gain of ``link``.

    Nodes are represented by their transmit-array center, so the two nodes
    are exactly ``D_lr`` apart. The SI links measure transmit-array center to
    receive-array center of the same node.
    """
    if link not in LINKS:
        raise KeyError(f"unknown link {link!r}")
    rx, tx = link
    if rx == tx:
        a = geometry.positions(rx, "rx").mean(axis=0)
        b = geometry.positions(tx, "tx").mean(axis=0)
    else:
        a, b = geometry.center(rx), geometry.center(tx)
    return float(np.linalg.norm(a - b))


def beta_scale(geometry: LinkGeometry, link: tuple[str, str]) -> float:
    """Distance-dependent gain ``D_lr / D_mn`` of a link (1 for the direct link)."""
    return geometry.inter_node_distance / link_distance(geometry, link)


def steering_vector(angle: float, n_elements: int,
                    spacing_over_wavelength: float = 0.5) -> np.ndarray:
    """Unit-modulus ULA response; entry k has phase -2*pi*(spacing/lambda)*k*sin(angle)."""
    k = np.arange(n_elements)
    return np.exp(-2j * np.pi * spacing_over_wavelength * k * np.sin(angle))
