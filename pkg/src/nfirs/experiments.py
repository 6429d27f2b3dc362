"""Seeded Monte-Carlo sweeps over SNR and IRS standoff distance, with CSV output."""

from __future__ import annotations

import csv
import hashlib
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channels import build_channel_set
from .config import ScenarioConfig
from .geometry import build_geometry
from .solver import solve_fd_irs, solve_fd_no_irs, solve_hd

__all__ = [
    "SCHEMES",
    "CSV_HEADER",
    "ResultRow",
    "scheme_config",
    "trial_seed",
    "run_trial",
    "run_snr_sweep",
    "run_distance_sweep",
    "with_averages",
    "emit_results",
    "read_results",
]

log = logging.getLogger(__name__)

CSV_HEADER = ("scheme", "snr_db", "distance_m", "trial", "seed", "wsr_bits",
              "outer_iters", "converged")


@dataclass(frozen=True)
class _Scheme:
    solver: str                          # "fd_irs", "fd_no_irs" or "hd"
    antennas: tuple[int, int] | None     # (M, N) override, None keeps the config
    irs_side: int | None                 # square IRS side, None keeps the config


SCHEMES = {
    "fd_irs_10": _Scheme("fd_irs", None, 10),
    "fd_irs_20": _Scheme("fd_irs", None, 20),
    "fd_irs_30": _Scheme("fd_irs", None, 30),
    # baselines ignore the IRSs; 1x1 surfaces keep channel sampling cheap
    "fd_100x50": _Scheme("fd_no_irs", (100, 50), 1),
    "hd_100x50": _Scheme("hd", (100, 50), 1),
}

_SOLVERS = {"fd_irs": solve_fd_irs, "fd_no_irs": solve_fd_no_irs, "hd": solve_hd}


def scheme_config(config: ScenarioConfig, scheme: str) -> ScenarioConfig:
    """``config`` with the antenna counts and IRS sizes of ``scheme``."""
    try:
        entry = SCHEMES[scheme]
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {sorted(SCHEMES)}") from None
    changes = {}
    if entry.antennas is not None:
        m, n = entry.antennas
        changes.update(M_l=m, M_r=m, N_l=n, N_r=n)
    if entry.irs_side is not None:
        side = (entry.irs_side, entry.irs_side)
        changes.update(irs_l_dims=side, irs_r_dims=side)
    return config.replace(**changes)


def trial_seed(master_seed: int, trial: int, scheme: str, snr_db: float,
               distance_m: float) -> int:
    """64-bit seed for one work item, stable across runs and platforms.

    The sweep point enters through fixed-precision strings, so the 3 m point
    of a distance sweep and the same SNR point of an SNR sweep share seeds.
    """
    key = f"{master_seed}|{trial}|{scheme}|{snr_db:.6f}|{distance_m:.6f}"
    digest = hashlib.blake2b(key.encode("ascii"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    snr_db: float
    distance_m: float
    trial: int | str          # "mean" on average rows
    seed: int | str           # "" on average rows
    wsr_bits: float
    outer_iters: int | float
    converged: bool | float   # fraction converged on average rows

    def as_record(self) -> list[str]:
        return [self.scheme, repr(float(self.snr_db)), repr(float(self.distance_m)),
                str(self.trial), str(self.seed), repr(float(self.wsr_bits)),
                str(self.outer_iters) if isinstance(self.outer_iters, int)
                else repr(float(self.outer_iters)),
                str(int(self.converged)) if isinstance(self.converged, bool)
                else repr(float(self.converged))]


def run_trial(config: ScenarioConfig, scheme: str, snr_db: float, trial: int) -> ResultRow:
    """One seeded channel draw and solve. ``config.D_irs`` is the standoff."""
    cfg = scheme_config(config, scheme).with_snr(snr_db)
    seed = trial_seed(config.master_seed, trial, scheme, snr_db, cfg.D_irs)
    channels = build_channel_set(build_geometry(cfg), cfg.cluster, seed)
    report = _SOLVERS[SCHEMES[scheme].solver](channels, cfg)
    return ResultRow(scheme, float(snr_db), float(cfg.D_irs), trial, seed,
                     float(report.final_wsr), int(report.outer_iterations),
                     bool(report.converged))


def _run_item(item):
    return run_trial(*item)


def _execute(items: list, workers: int) -> list[ResultRow]:
    if workers <= 1:
        return [_run_item(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_item, items, chunksize=4))


def _sort_key(row: ResultRow):
    return (row.scheme, row.snr_db, row.distance_m,
            math.inf if row.trial == "mean" else row.trial)


def with_averages(rows: list[ResultRow]) -> list[ResultRow]:
    """Trial rows followed, per (scheme, snr, distance), by one ``mean`` row."""
    groups: dict[tuple, list[ResultRow]] = {}
    for row in rows:
        if row.trial != "mean":
            groups.setdefault((row.scheme, row.snr_db, row.distance_m), []).append(row)
    out = []
    for (scheme, snr, dist), members in groups.items():
        out.extend(members)
        out.append(ResultRow(scheme, snr, dist, "mean", "",
                             float(np.mean([r.wsr_bits for r in members])),
                             float(np.mean([r.outer_iters for r in members])),
                             float(np.mean([r.converged for r in members]))))
    return sorted(out, key=_sort_key)


def _check_schemes(schemes) -> list[str]:
    schemes = list(schemes)
    if not schemes:
        raise ValueError("at least one scheme is required")
    for s in schemes:
        scheme_config(ScenarioConfig(), s)
    return schemes


def run_snr_sweep(config: ScenarioConfig, snr_grid, schemes, workers: int = 1,
                  n_trials: int | None = None) -> list[ResultRow]:
    """Average WSR versus SNR for each scheme at the configured standoff."""
    snr_grid = [float(v) for v in snr_grid]
    if not snr_grid:
        raise ValueError("snr_grid must be nonempty")
    schemes = _check_schemes(schemes)
    n_trials = config.n_trials if n_trials is None else n_trials
    items = [(config, scheme, snr, t) for scheme in schemes for snr in snr_grid
             for t in range(n_trials)]
    log.info("snr sweep: %d solves", len(items))
    return with_averages(_execute(items, workers))


def run_distance_sweep(config: ScenarioConfig, distance_grid,
                       schemes=("fd_irs_10", "fd_irs_20", "fd_irs_30"),
                       snr_db: float = 30.0, workers: int = 1,
                       n_trials: int | None = None) -> list[ResultRow]:
    """Average WSR versus IRS standoff distance at a fixed SNR."""
    distance_grid = [float(v) for v in distance_grid]
    if not distance_grid:
        raise ValueError("distance_grid must be nonempty")
    for d in distance_grid:
        if not 0.0 < d < config.D_lr / 2:
            raise ValueError(f"distance {d} m is outside (0, {config.D_lr / 2})")
    schemes = _check_schemes(schemes)
    n_trials = config.n_trials if n_trials is None else n_trials
    items = [(config.replace(D_irs=d), scheme, float(snr_db), t) for scheme in schemes
             for d in distance_grid for t in range(n_trials)]
    log.info("distance sweep: %d solves", len(items))
    return with_averages(_execute(items, workers))


def emit_results(rows: list[ResultRow], path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for row in rows:
                writer.writerow(row.as_record())
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_results(path) -> list[ResultRow]:
    """Inverse of :func:`emit_results`; floats round-trip exactly."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = []
        for rec in reader:
            scheme, snr, dist, trial, seed, wsr, iters, conv = rec
            is_mean = trial == "mean"
            rows.append(ResultRow(
                scheme, float(snr), float(dist),
                trial if is_mean else int(trial),
                seed if is_mean else int(seed),
                float(wsr),
                float(iters) if is_mean else int(iters),
                float(conv) if is_mean else conv == "1"))
    return rows
