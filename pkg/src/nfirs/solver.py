"""Alternating optimization of precoders, combiners and IRS phases, plus the
fully digital FD and HD baselines without IRSs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelSet
from .config import ScenarioConfig
from .effective import EffectiveChannels, IrsPhases, compose_effective, direct_channels
from .irs_mm import build_quadratic_form, optimize_irs
from .wmmse import (
    LN2,
    SolverState,
    initial_precoder,
    receiver_stats,
    update_precoder,
    weighted_sum_rate,
)

__all__ = ["SolveReport", "solve_fd_irs", "solve_fd_no_irs", "solve_hd", "HD_SEMANTICS"]

HD_SEMANTICS = ("half-duplex: each direction decoded without SI at full power, "
                "each active half of the time; WSR = 0.5 * (w_r R_l->r + w_l R_r->l)")

_NODES = ("l", "r")


@dataclass
class SolveReport:
    final_wsr: float                 # bits/s/Hz
    wsr_trajectory: list[float]      # bits/s/Hz; entry 0 is the initial point
    outer_iterations: int
    converged: bool
    final_state: SolverState
    final_phases: IrsPhases | None
    description: str = ""


def _refresh(state: SolverState, eff: EffectiveChannels, config: ScenarioConfig) -> None:
    """MMSE combiners, error covariances and weights at the current precoders."""
    sigma2 = {"l": config.sigma2_l, "r": config.sigma2_r}
    w = {"l": config.w_l, "r": config.w_r}
    for node in _NODES:
        stats = receiver_stats(eff, state.V_l, state.V_r, node, sigma2[node])
        state.set("F", node, stats.combiner())
        state.set("E", node, stats.error_covariance())
        state.set("W", node, stats.weight(w[node]))


def _wsr(eff: EffectiveChannels, state: SolverState, config: ScenarioConfig) -> float:
    return weighted_sum_rate(eff, state.V_l, state.V_r, config.w_l, config.w_r,
                             config.sigma2_l, config.sigma2_r)


def _alternate(channels: ChannelSet, config: ScenarioConfig, optimize_phases: bool,
               irs_order: tuple[str, str] = ("il", "ir"),
               rate_scale: float = 1.0) -> SolveReport:
    power = {"l": config.p_l, "r": config.p_r}
    streams = {"l": config.d_l, "r": config.d_r}
    if optimize_phases:
        phases = IrsPhases.identity(channels.n_elements("il"), channels.n_elements("ir"))

        def effective():
            return compose_effective(channels, phases, config.double_reflection)
    else:
        phases = None

        def effective():
            return direct_channels(channels)

    eff = effective()
    state = SolverState(
        V_l=initial_precoder(eff[("r", "l")], streams["l"], power["l"]),
        V_r=initial_precoder(eff[("l", "r")], streams["r"], power["r"]),
    )
    _refresh(state, eff, config)
    state.wsr_history.append(_wsr(eff, state, config))

    converged = False
    n_outer = 0
    for n_outer in range(1, config.max_outer + 1):
        # both precoder subproblems share one (F, W) snapshot and decouple given it
        updates = {node: update_precoder(eff, state.F_l, state.F_r, state.W_l, state.W_r,
                                         node, power[node]) for node in _NODES}
        for node, (V, mu) in updates.items():
            state.set("V", node, V)
            state.set("mu", node, mu)

        if optimize_phases:
            for irs in irs_order:
                _refresh(state, eff, config)
                other_irs = "ir" if irs == "il" else "il"
                form = build_quadratic_form(
                    channels, phases[other_irs], state.V_l, state.V_r, state.F_l, state.F_r,
                    state.W_l, state.W_r, irs, config.sigma2_l, config.sigma2_r,
                    config.double_reflection, phase=phases[irs], E_l=state.E_l, E_r=state.E_r)
                result = optimize_irs(form, phases[irs], config.irs_eps, config.irs_max_iters)
                phases = phases.with_phase(irs, result.phi)
                eff = effective()

        _refresh(state, eff, config)
        wsr = _wsr(eff, state, config)
        prev = state.wsr_history[-1]
        state.wsr_history.append(wsr)
        if abs(wsr - prev) <= config.outer_eps * max(abs(wsr), 1e-300):
            converged = True
            break

    trajectory = [rate_scale * w / LN2 for w in state.wsr_history]
    return SolveReport(
        final_wsr=trajectory[-1],
        wsr_trajectory=trajectory,
        outer_iterations=n_outer,
        converged=converged,
        final_state=state,
        final_phases=phases,
    )


def solve_fd_irs(channels: ChannelSet, config: ScenarioConfig,
                 irs_order: tuple[str, str] = ("il", "ir")) -> SolveReport:
    """Joint digital and IRS optimization of the full-duplex link.

    Each outer iteration updates combiners and weights of both nodes, both
    precoders, then each IRS in ``irs_order`` (combiners and weights are
    refreshed before each IRS), and records the WSR.
    """
    report = _alternate(channels, config, optimize_phases=True, irs_order=tuple(irs_order))
    report.description = "fd-irs"
    return report


def solve_fd_no_irs(channels: ChannelSet, config: ScenarioConfig) -> SolveReport:
    """Fully digital FD baseline on the direct and SI channels only."""
    report = _alternate(channels, config, optimize_phases=False)
    report.description = "fd-no-irs"
    return report


def solve_hd(channels: ChannelSet, config: ScenarioConfig) -> SolveReport:
    """Half-duplex baseline; see :data:`HD_SEMANTICS`.

    With the SI channels removed the two directions decouple, so the joint
    WMMSE loop optimizes each direction independently.
    """
    report = _alternate(channels.without_si(), config, optimize_phases=False, rate_scale=0.5)
    report.description = HD_SEMANTICS
    return report
