"""Effective channels seen through both IRSs (direct, single and double bounce)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelSet

__all__ = ["IrsPhases", "EffectiveChannels", "compose_effective", "effective_link",
           "direct_channels"]

_OWN_IRS = {"l": "il", "r": "ir"}
_OTHER_IRS = {"il": "ir", "ir": "il"}


@dataclass(frozen=True)
class IrsPhases:
    phi_l: np.ndarray
    phi_r: np.ndarray

    def __post_init__(self):
        for name in ("phi_l", "phi_r"):
            v = np.asarray(getattr(self, name), dtype=complex).ravel()
            if v.size == 0 or np.max(np.abs(np.abs(v) - 1.0)) > 1e-12:
                raise ValueError(f"{name} must be a nonempty unit-modulus vector")
            object.__setattr__(self, name, v)

    @classmethod
    def identity(cls, n_l: int, n_r: int) -> "IrsPhases":
        return cls(np.ones(n_l, dtype=complex), np.ones(n_r, dtype=complex))

    @classmethod
    def from_angles(cls, theta_l, theta_r) -> "IrsPhases":
        return cls(np.exp(1j * np.asarray(theta_l)), np.exp(1j * np.asarray(theta_r)))

    def __getitem__(self, irs: str) -> np.ndarray:
        return {"il": self.phi_l, "ir": self.phi_r}[irs]

    def with_phase(self, irs: str, phi: np.ndarray) -> "IrsPhases":
        if irs == "il":
            return IrsPhases(phi, self.phi_r)
        return IrsPhases(self.phi_l, phi)


@dataclass(frozen=True)
class EffectiveChannels:
    h_eff_lr: np.ndarray
    h_eff_rl: np.ndarray
    h_eff_ll: np.ndarray
    h_eff_rr: np.ndarray

    def __getitem__(self, link: tuple[str, str]) -> np.ndarray:
        rx, tx = link
        return getattr(self, f"h_eff_{rx}{tx}")


def effective_link(channels: ChannelSet, rx: str, tx: str, phi_l: np.ndarray,
                   phi_r: np.ndarray, double_reflection: bool = True) -> np.ndarray:
    """Effective channel from node ``tx`` to node ``rx`` for arbitrary phase vectors.

    The double bounce goes transmitter -> own IRS -> other IRS -> receiver.
    Diagonal reflection matrices are applied as column scalings.
    """
    phis = {"il": phi_l, "ir": phi_r}
    h = channels[(rx, tx)].copy()
    for irs in ("il", "ir"):
        h = h + (channels[(rx, irs)] * phis[irs]) @ channels[(irs, tx)]
    if double_reflection:
        first = _OWN_IRS[tx]
        second = _OTHER_IRS[first]
        inner = (channels[(second, first)] * phis[first]) @ channels[(first, tx)]
        h = h + (channels[(rx, second)] * phis[second]) @ inner
    return h


def compose_effective(channels: ChannelSet, phases: IrsPhases,
                      double_reflection: bool = True) -> EffectiveChannels:
    """Four effective channels for the given IRS phases."""
    n_l, n_r = channels.n_elements("il"), channels.n_elements("ir")
    if phases.phi_l.size != n_l or phases.phi_r.size != n_r:
        raise ValueError(
            f"phase sizes ({phases.phi_l.size}, {phases.phi_r.size}) do not match "
            f"IRS sizes ({n_l}, {n_r})")
    mats = {
        f"h_eff_{rx}{tx}": effective_link(channels, rx, tx, phases.phi_l, phases.phi_r,
                                          double_reflection)
        for rx, tx in (("l", "r"), ("r", "l"), ("l", "l"), ("r", "r"))
    }
    return EffectiveChannels(**mats)


def direct_channels(channels: ChannelSet) -> EffectiveChannels:
    """Effective channels of a link without IRSs."""
    return EffectiveChannels(
        h_eff_lr=channels[("l", "r")], h_eff_rl=channels[("r", "l")],
        h_eff_ll=channels[("l", "l")], h_eff_rr=channels[("r", "r")])
