"""Scenario parameters and the ``key = value`` config file format."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from .channels import ClusterParams

__all__ = ["ScenarioConfig", "ConfigParseError", "parse_config", "format_config",
           "snr_to_power", "power_to_snr"]


@dataclass(frozen=True)
class ScenarioConfig:
    """Link scenario. Defaults reproduce the 30 GHz, 200 m setup with 20x10 nodes."""

    M_l: int = 20
    M_r: int = 20
    N_l: int = 10
    N_r: int = 10
    d_l: int = 2
    d_r: int = 2
    irs_l_dims: tuple[int, int] = (10, 10)
    irs_r_dims: tuple[int, int] = (10, 10)
    p_l: float = 1000.0
    p_r: float = 1000.0
    sigma2_l: float = 1.0
    sigma2_r: float = 1.0
    w_l: float = 1.0
    w_r: float = 1.0
    wavelength: float = 0.01
    D_lr: float = 200.0
    D_irs: float = 3.0
    D_b: float = 0.2
    Theta_b: float = math.pi
    cluster: ClusterParams = field(default_factory=ClusterParams)
    double_reflection: bool = True
    irs_eps: float = 1e-4
    irs_max_iters: int = 50
    outer_eps: float = 1e-4
    max_outer: int = 100
    master_seed: int = 0
    n_trials: int = 100

    def __post_init__(self):
        for name in ("M_l", "M_r", "N_l", "N_r", "d_l", "d_r", "irs_max_iters",
                     "max_outer", "n_trials"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("irs_l_dims", "irs_r_dims"):
            dims = tuple(int(v) for v in getattr(self, name))
            if len(dims) != 2 or min(dims) < 1:
                raise ValueError(f"{name} must be two counts >= 1")
            object.__setattr__(self, name, dims)
        for name in ("p_l", "p_r", "sigma2_l", "sigma2_r"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def with_snr(self, snr_db: float) -> "ScenarioConfig":
        """Set both transmit powers so that ``p / sigma2`` equals ``snr_db``."""
        return self.replace(p_l=snr_to_power(snr_db, self.sigma2_l),
                            p_r=snr_to_power(snr_db, self.sigma2_r))

    def relabeled(self) -> "ScenarioConfig":
        """Same scenario with the node labels l and r swapped."""
        return self.replace(M_l=self.M_r, M_r=self.M_l, N_l=self.N_r, N_r=self.N_l,
                            d_l=self.d_r, d_r=self.d_l, irs_l_dims=self.irs_r_dims,
                            irs_r_dims=self.irs_l_dims, p_l=self.p_r, p_r=self.p_l,
                            sigma2_l=self.sigma2_r, sigma2_r=self.sigma2_l,
                            w_l=self.w_r, w_r=self.w_l)


def snr_to_power(snr_db: float, sigma2: float = 1.0) -> float:
    return sigma2 * 10.0 ** (snr_db / 10.0)


def power_to_snr(power: float, sigma2: float = 1.0) -> float:
    return 10.0 * math.log10(power / sigma2)


class ConfigParseError(ValueError):
    def __init__(self, path, line_no: int | None, key: str | None, message: str):
        where = f"{path}" if line_no is None else f"{path}:{line_no}"
        if key is not None:
            where += f" [{key}]"
        super().__init__(f"{where}: {message}")
        self.path, self.line_no, self.key = path, line_no, key


_INT_KEYS = {"M_l", "M_r", "N_l", "N_r", "d_l", "d_r", "irs_max_iters", "max_outer",
             "master_seed", "n_trials", "irs_l_rows", "irs_l_cols", "irs_r_rows",
             "irs_r_cols", "n_clusters", "n_rays"}
_FLOAT_KEYS = {"p_l", "p_r", "sigma2_l", "sigma2_r", "w_l", "w_r", "wavelength", "D_lr",
               "D_irs", "D_b", "Theta_b_deg", "irs_eps", "outer_eps", "snr_db",
               "angle_min_deg", "angle_max_deg", "ray_jitter_deg", "rician_kappa"}
_BOOL_KEYS = {"double_reflection"}
_KEYS = _INT_KEYS | _FLOAT_KEYS | _BOOL_KEYS


def _convert(key: str, raw: str):
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    low = raw.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_config(path) -> ScenarioConfig:
    """Read a flat ``key = value`` file; unspecified keys keep their defaults.

    Lines starting with ``#`` and blank lines are ignored; trailing ``#``
    comments are stripped. ``snr_db`` sets both powers from the noise
    variances. Angles are given in degrees.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(path, None, None, f"cannot read config: {exc}") from exc

    values: dict[str, object] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(path, line_no, None, f"expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigParseError(path, line_no, key, "unknown key")
        if not raw:
            raise ConfigParseError(path, line_no, key, "missing value")
        try:
            values[key] = _convert(key, raw)
        except ValueError:
            raise ConfigParseError(path, line_no, key, f"invalid value {raw!r}") from None

    base = ScenarioConfig()
    kwargs: dict[str, object] = {}
    cluster: dict[str, object] = {}
    for key, value in values.items():
        if key.startswith(("irs_l_", "irs_r_")) and key.endswith(("rows", "cols")):
            continue
        if key in ("n_clusters", "n_rays", "rician_kappa"):
            cluster[key] = value
        elif key == "ray_jitter_deg":
            cluster["ray_jitter"] = math.radians(value)
        elif key in ("angle_min_deg", "angle_max_deg", "snr_db"):
            continue
        elif key == "Theta_b_deg":
            kwargs["Theta_b"] = math.radians(value)
        else:
            kwargs[key] = value
    for side in ("l", "r"):
        dims = getattr(base, f"irs_{side}_dims")
        kwargs[f"irs_{side}_dims"] = (values.get(f"irs_{side}_rows", dims[0]),
                                      values.get(f"irs_{side}_cols", dims[1]))
    if "angle_min_deg" in values or "angle_max_deg" in values:
        lo, hi = base.cluster.angle_range
        cluster["angle_range"] = (math.radians(values.get("angle_min_deg", math.degrees(lo))),
                                  math.radians(values.get("angle_max_deg", math.degrees(hi))))
    try:
        if cluster:
            kwargs["cluster"] = dataclasses.replace(base.cluster, **cluster)
        config = base.replace(**kwargs)
        if "snr_db" in values:
            config = config.with_snr(values["snr_db"])
    except ValueError as exc:
        raise ConfigParseError(path, None, None, str(exc)) from None
    return config


def format_config(config: ScenarioConfig) -> str:
    """Render ``config`` in the file format read by :func:`parse_config`."""
    c = config.cluster
    lines = []
    for f in dataclasses.fields(config):
        name = f.name
        value = getattr(config, name)
        if name in ("irs_l_dims", "irs_r_dims"):
            side = name[4]
            lines.append(f"irs_{side}_rows = {value[0]}")
            lines.append(f"irs_{side}_cols = {value[1]}")
        elif name == "cluster":
            lines += [f"n_clusters = {c.n_clusters}", f"n_rays = {c.n_rays}",
                      f"angle_min_deg = {math.degrees(c.angle_range[0])!r}",
                      f"angle_max_deg = {math.degrees(c.angle_range[1])!r}",
                      f"ray_jitter_deg = {math.degrees(c.ray_jitter)!r}",
                      f"rician_kappa = {c.rician_kappa!r}"]
        elif name == "Theta_b":
            lines.append(f"Theta_b_deg = {math.degrees(value)!r}")
        else:
            lines.append(f"{name} = {value!r}")
    return "\n".join(lines) + "\n"
