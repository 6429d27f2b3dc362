"""Digital half of the alternating optimizer.

Node ``i`` transmits with precoder ``V_i`` and receives the other node's
streams with combiner ``F_i``. ``E_i`` and ``W_i`` are the error covariance
and rate weight of the streams decoded at node ``i``. Rates are in nats
internally; conversion to bits happens only in reports.

Per-stream SINRs in the near-field IRS scenario reach 1e13, where the
textbook expressions (``R^-1``, ``ln det R - ln det R_bar``,
``I - F H V``) lose every significant digit. Everything here goes through
the whitened desired channel ``G = R_bar^-1/2 H V`` and its SVD instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .effective import EffectiveChannels

__all__ = [
    "LN2",
    "SolverState",
    "ReceiverStats",
    "other",
    "hermitian",
    "psd_sqrt",
    "receive_covariances",
    "receiver_stats",
    "mmse_combiner",
    "mse_matrix",
    "error_covariance",
    "weight_matrices",
    "precoder_power",
    "update_precoder",
    "weighted_sum_rate",
    "node_rate",
    "initial_precoder",
    "BisectionError",
]

LN2 = float(np.log(2.0))


class BisectionError(RuntimeError):
    pass


def other(node: str) -> str:
    return {"l": "r", "r": "l"}[node]


def hermitian(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Hermitian square root of a PSD matrix (negative rounding noise clipped)."""
    lam, u = np.linalg.eigh(hermitian(a))
    return (u * np.sqrt(np.clip(lam, 0.0, None))) @ u.conj().T


@dataclass
class SolverState:
    V_l: np.ndarray
    V_r: np.ndarray
    F_l: np.ndarray | None = None
    F_r: np.ndarray | None = None
    W_l: np.ndarray | None = None
    W_r: np.ndarray | None = None
    E_l: np.ndarray | None = None
    E_r: np.ndarray | None = None
    mu_l: float = 0.0
    mu_r: float = 0.0
    wsr_history: list[float] = field(default_factory=list)

    def get(self, name: str, node: str):
        return getattr(self, f"{name}_{node}")

    def set(self, name: str, node: str, value) -> None:
        setattr(self, f"{name}_{node}", value)


class _Whitener:
    """Applies ``R_bar^-1/2`` for ``R_bar = sigma2 I + A A^H`` without forming it."""

    def __init__(self, A: np.ndarray, sigma2: float):
        u, s, _ = np.linalg.svd(A, full_matrices=False)
        keep = s > 0
        self.u = u[:, keep]
        self.inv_sigma = 1.0 / np.sqrt(sigma2)
        # R_bar^-1/2 = (I - U U^H)/sigma + U diag(1/sqrt(sigma2 + s^2)) U^H
        self.shrink = self.inv_sigma - 1.0 / np.sqrt(sigma2 + s[keep] ** 2)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.inv_sigma * x - self.u @ (self.shrink[:, None] * (self.u.conj().T @ x))


@dataclass
class ReceiverStats:
    """Whitened view of one receiver at fixed precoders.

    ``G = R_bar^-1/2 D = U diag(s) Wv^H`` with ``D`` the desired signal
    channel ``H_eff V`` (``Wv`` is square, ``s`` zero-padded to the stream
    count) and ``white_u = R_bar^-1/2 U``.
    """

    s: np.ndarray
    Wv: np.ndarray
    white_u: np.ndarray

    @property
    def rate(self) -> float:
        return float(np.sum(np.log1p(self.s**2)))

    def error_covariance(self) -> np.ndarray:
        return hermitian((self.Wv / (1.0 + self.s**2)) @ self.Wv.conj().T)

    def combiner(self) -> np.ndarray:
        # F = E G^H R_bar^-1/2
        return (self.Wv * (self.s / (1.0 + self.s**2))) @ self.white_u.conj().T

    def weight(self, w: float) -> np.ndarray:
        return hermitian((w / LN2) * (self.Wv * (1.0 + self.s**2)) @ self.Wv.conj().T)


def receiver_stats(eff: EffectiveChannels, V_l: np.ndarray, V_r: np.ndarray, node: str,
                   sigma2: float = 1.0) -> ReceiverStats:
    V = {"l": V_l, "r": V_r}
    j = other(node)
    whiten = _Whitener(eff[(node, node)] @ V[node], sigma2)
    G = whiten(eff[(node, j)] @ V[j])
    n_rx, d = G.shape
    u, s, vh = np.linalg.svd(G, full_matrices=True)
    k = min(n_rx, d)
    s_full = np.zeros(d)
    s_full[:k] = s
    u_full = np.zeros((n_rx, d), dtype=complex)
    u_full[:, :k] = u[:, :k]
    return ReceiverStats(s=s_full, Wv=vh.conj().T, white_u=whiten(u_full))


def receive_covariances(eff: EffectiveChannels, V_l: np.ndarray, V_r: np.ndarray,
                        node: str, sigma2: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Total and interference-plus-noise receive covariances ``(R, R_bar)`` at ``node``."""
    V = {"l": V_l, "r": V_r}
    j = other(node)
    hd = eff[(node, j)] @ V[j]
    hs = eff[(node, node)] @ V[node]
    r_bar = hermitian(hs @ hs.conj().T + sigma2 * np.eye(hs.shape[0]))
    return hermitian(hd @ hd.conj().T + r_bar), r_bar


def mmse_combiner(eff: EffectiveChannels, V_l: np.ndarray, V_r: np.ndarray, node: str,
                  sigma2: float = 1.0) -> np.ndarray:
    """MMSE combiner ``F = V_j^H H^H R^-1`` applied by ``node`` (``d_j x N_node``)."""
    return receiver_stats(eff, V_l, V_r, node, sigma2).combiner()


def mse_matrix(eff: EffectiveChannels, V_l: np.ndarray, V_r: np.ndarray, F: np.ndarray,
               node: str, sigma2: float = 1.0) -> np.ndarray:
    """MSE covariance ``E[(F y - s)(F y - s)^H]`` for an arbitrary combiner ``F``.

    Written as ``(F H V - I)(F H V - I)^H + F R_bar F^H``, the expansion of
    the definition into PSD terms.
    """
    V = {"l": V_l, "r": V_r}
    j = other(node)
    e = F @ eff[(node, j)] @ V[j] - np.eye(F.shape[0])
    si = F @ eff[(node, node)] @ V[node]
    return hermitian(e @ e.conj().T + si @ si.conj().T + sigma2 * F @ F.conj().T)


def error_covariance(eff: EffectiveChannels, V_l: np.ndarray, V_r: np.ndarray, node: str,
                     sigma2: float = 1.0) -> np.ndarray:
    """Error covariance at the MMSE combiner, ``(I + V^H H^H R_bar^-1 H V)^-1``."""
    return receiver_stats(eff, V_l, V_r, node, sigma2).error_covariance()


def weight_matrices(E_l: np.ndarray, E_r: np.ndarray, w_l: float,
                    w_r: float) -> tuple[np.ndarray, np.ndarray]:
    """``W_k = w_k / ln 2 * E_k^-1``."""
    return (hermitian(w_l / LN2 * np.linalg.inv(E_l)),
            hermitian(w_r / LN2 * np.linalg.inv(E_r)))


def precoder_power(lam: np.ndarray, g: np.ndarray, mu: float) -> float:
    """``Tr(V V^H) = sum_k g_k / (lam_k + mu)^2`` in the eigenbasis of ``X``."""
    return float(np.sum(g / (lam + mu) ** 2))


def update_precoder(eff: EffectiveChannels, F_l: np.ndarray, F_r: np.ndarray,
                    W_l: np.ndarray, W_r: np.ndarray, node: str, power_budget: float,
                    max_bisections: int = 200) -> tuple[np.ndarray, float]:
    """Minimize the weighted MSE over ``V_node`` under ``Tr(V V^H) <= power_budget``.

    Returns ``(V, mu)`` with ``V = (X + mu I)^-1 H^H F^H W``, where
    ``X = Y Y^H`` stacks the desired-link and SI quadratic terms. ``mu`` is
    zero when the unconstrained minimizer meets the budget, else it is found
    by bisection on ``Tr(V V^H) = power_budget``.

    The solve runs in the SVD basis of the thin factor ``Y`` (push-through
    identity), so ``X`` is never inverted directly.
    """
    if not power_budget > 0:
        raise ValueError("power_budget must be positive")
    F = {"l": F_l, "r": F_r}
    W = {"l": W_l, "r": W_r}
    j = other(node)
    w_half_j = psd_sqrt(W[j])
    y_d = eff[(j, node)].conj().T @ F[j].conj().T @ w_half_j
    y_s = eff[(node, node)].conj().T @ F[node].conj().T @ psd_sqrt(W[node])
    Y = np.hstack([y_d, y_s])
    u, sv, qh = np.linalg.svd(Y, full_matrices=False)
    keep = sv > 1e-13 * sv.max() if sv.size and sv.max() > 0 else np.zeros(sv.shape, bool)
    u, sv, qh = u[:, keep], sv[keep], qh[keep]
    d_j = y_d.shape[1]
    # B = y_d W_j^1/2, and U^H B = diag(sv) Z with Z = Q^H [W_j^1/2; 0]
    Z = qh[:, :d_j] @ w_half_j
    lam = sv**2
    g = lam * np.sum(np.abs(Z) ** 2, axis=1)
    m = eff[(j, node)].shape[1]
    d_out = W[j].shape[0]
    if g.size == 0 or g.sum() == 0.0:
        return np.zeros((m, d_out), dtype=complex), 0.0

    def solve(mu):
        return u @ ((sv / (lam + mu))[:, None] * Z)

    if precoder_power(lam, g, 0.0) <= power_budget:
        return solve(0.0), 0.0

    lo, hi = 0.0, np.sqrt(g.sum() / power_budget)
    while precoder_power(lam, g, hi) > power_budget:
        hi *= 2.0
        if not np.isfinite(hi):
            raise BisectionError("could not bracket the power multiplier")
    for _ in range(max_bisections):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if precoder_power(lam, g, mid) > power_budget:
            lo = mid
        else:
            hi = mid
    p_hi = precoder_power(lam, g, hi)
    if abs(p_hi - power_budget) > 1e-6 * power_budget:
        raise BisectionError(f"bisection ended with power {p_hi} for budget {power_budget}")
    return solve(hi), hi


def node_rate(eff: EffectiveChannels, V_l: np.ndarray, V_r: np.ndarray, node: str,
              sigma2: float = 1.0) -> float:
    """Rate (nats) of the streams decoded at ``node``: ``ln det(R_bar^-1 R)``."""
    return receiver_stats(eff, V_l, V_r, node, sigma2).rate


def weighted_sum_rate(eff: EffectiveChannels, V_l: np.ndarray, V_r: np.ndarray,
                      w_l: float, w_r: float, sigma2_l: float = 1.0,
                      sigma2_r: float = 1.0) -> float:
    """``w_l ln det(R_bar_l^-1 R_l) + w_r ln det(R_bar_r^-1 R_r)`` in nats."""
    return (w_l * node_rate(eff, V_l, V_r, "l", sigma2_l)
            + w_r * node_rate(eff, V_l, V_r, "r", sigma2_r))


def initial_precoder(h: np.ndarray, n_streams: int, power: float) -> np.ndarray:
    """Top right singular vectors of ``h`` with equal power per stream."""
    _, _, vh = np.linalg.svd(h, full_matrices=True)
    v = vh.conj().T[:, :n_streams]
    return v * np.sqrt(power / n_streams)
