"""Unit-modulus quadratic program for one IRS and its majorization-minimization solver.

With precoders, combiners, weights and the other IRS fixed, the weighted MSE
``Tr(W_l E_l) + Tr(W_r E_r)`` is a quadratic function of the phase vector
``phi`` of one IRS::

    f(phi) = phi^H Sigma phi + s^H conj(phi) + s^T phi + c

Every effective channel is affine in ``phi``, ``H = C + P diag(phi) Q``, which
gives ``Sigma`` as a sum of Hadamard products ``(P^H M P) * (Q K Q^H)^T`` of
PSD factors.

At high SINR the constant ``c`` and ``phi^H Sigma phi`` are many orders of
magnitude larger than ``f`` itself, so the form is stored around an
expansion point: ``f(center + delta) = f0 + 2 Re(delta^H g) + delta^H Sigma delta``
with ``g = Sigma center + conj(s)``. ``s`` and ``c`` remain available as
derived properties.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import eigsh

from .channels import ChannelSet
from .wmmse import hermitian, psd_sqrt

__all__ = [
    "QuadraticForm",
    "MMResult",
    "affine_decomposition",
    "build_quadratic_form",
    "largest_eigenvalue",
    "mm_direction",
    "mm_phase_update",
    "optimize_irs",
]

_OWN_IRS = {"l": "il", "r": "ir"}
_OTHER_IRS = {"il": "ir", "ir": "il"}
_DENSE_EIG_LIMIT = 256


def largest_eigenvalue(sigma: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian PSD matrix, never underestimated.

    Large matrices use Lanczos from a fixed start vector; its Ritz value is a
    lower bound, so a small relative margin is added.
    """
    n = sigma.shape[0]
    if not np.any(sigma):
        return 0.0
    if n <= _DENSE_EIG_LIMIT:
        return max(float(np.linalg.eigvalsh(sigma)[-1]), 0.0)
    val = eigsh(sigma, k=1, which="LA", return_eigenvectors=False,
                v0=np.ones(n, dtype=sigma.dtype), tol=1e-12)[0]
    return max(float(val) * (1.0 + 1e-9), 0.0)


@dataclass
class QuadraticForm:
    sigma: np.ndarray
    gradient: np.ndarray
    center: np.ndarray
    center_value: float
    _lambda_max: float | None = field(default=None, repr=False)

    @classmethod
    def from_coefficients(cls, sigma, s, constant: float = 0.0) -> "QuadraticForm":
        """Form ``phi^H sigma phi + 2 Re(s^T phi) + constant``."""
        s = np.asarray(s, dtype=complex)
        return cls(np.asarray(sigma, dtype=complex), np.conj(s), np.zeros_like(s),
                   float(constant))

    @property
    def s(self) -> np.ndarray:
        return np.conj(self.gradient - self.sigma @ self.center)

    @property
    def constant(self) -> float:
        c = self.center
        return float(self.center_value - np.real(np.vdot(c, self.sigma @ c))
                     - 2.0 * np.real(self.s @ c))

    @property
    def lambda_max(self) -> float:
        if self._lambda_max is None:
            self._lambda_max = largest_eigenvalue(self.sigma)
        return self._lambda_max

    def gradient_at(self, phi: np.ndarray) -> np.ndarray:
        """``Sigma phi + conj(s)``, the derivative with respect to ``conj(phi)``."""
        return self.gradient + self.sigma @ (phi - self.center)

    def __call__(self, phi: np.ndarray) -> float:
        delta = np.asarray(phi) - self.center
        return float(self.center_value + 2.0 * np.real(np.vdot(delta, self.gradient))
                     + np.real(np.vdot(delta, self.sigma @ delta)))


def affine_decomposition(channels: ChannelSet, irs: str, other_phase: np.ndarray,
                         rx: str, tx: str, double_reflection: bool = True):
    """Split the effective channel ``tx -> rx`` as ``C + P diag(phi_irs) Q``."""
    o = _OTHER_IRS[irs]
    C = channels[(rx, tx)] + (channels[(rx, o)] * other_phase) @ channels[(o, tx)]
    P = channels[(rx, irs)]
    Q = channels[(irs, tx)]
    if double_reflection:
        if _OWN_IRS[tx] == irs:
            # tx -> irs -> o -> rx
            P = P + (channels[(rx, o)] * other_phase) @ channels[(o, irs)]
        else:
            # tx -> o -> irs -> rx
            Q = Q + channels[(irs, o)] @ (other_phase[:, None] * channels[(o, tx)])
    return C, P, Q


def build_quadratic_form(channels: ChannelSet, other_phase: np.ndarray,
                         V_l: np.ndarray, V_r: np.ndarray, F_l: np.ndarray,
                         F_r: np.ndarray, W_l: np.ndarray, W_r: np.ndarray, irs: str,
                         sigma2_l: float = 1.0, sigma2_r: float = 1.0,
                         double_reflection: bool = True, phase: np.ndarray | None = None,
                         E_l: np.ndarray | None = None,
                         E_r: np.ndarray | None = None) -> QuadraticForm:
    """Weighted MSE as a quadratic form in the phases of IRS ``irs`` (``"il"``/``"ir"``).

    ``phase`` is the expansion point (all ones if omitted); the form is exact
    everywhere, including its constant. When ``F_l, F_r`` are the MMSE
    combiners at ``phase``, passing the matching error covariances lets the
    desired-link residual ``F H V - I`` be taken as ``-E`` instead of being
    computed by cancellation.
    """
    if irs not in _OTHER_IRS:
        raise KeyError(f"unknown IRS {irs!r}")
    other_phase = np.asarray(other_phase, dtype=complex)
    if other_phase.size != channels.n_elements(_OTHER_IRS[irs]):
        raise ValueError("other_phase does not match the other IRS size")
    n = channels.n_elements(irs)
    phase = np.ones(n, dtype=complex) if phase is None else np.asarray(phase, dtype=complex)
    if phase.size != n:
        raise ValueError("phase does not match the IRS size")
    V = {"l": V_l, "r": V_r}
    F = {"l": F_l, "r": F_r}
    W = {"l": W_l, "r": W_r}
    E = {"l": E_l, "r": E_r}
    sigma2 = {"l": sigma2_l, "r": sigma2_r}

    sigma = np.zeros((n, n), dtype=complex)
    grad = np.zeros(n, dtype=complex)
    value = 0.0
    for a in ("l", "r"):
        wf = psd_sqrt(W[a]) @ F[a]
        value += sigma2[a] * float(np.sum(np.abs(wf) ** 2))
        for b in ("l", "r"):
            C, P, Q = affine_decomposition(channels, irs, other_phase, a, b,
                                           double_reflection)
            A1 = wf @ P              # W^1/2 F P
            A2 = Q @ V[b]            # Q V
            sigma += (A1.conj().T @ A1) * (A2 @ A2.conj().T).T
            if a != b and E[a] is not None:
                resid = -psd_sqrt(W[a]) @ E[a]
            else:
                resid = wf @ (C + (P * phase) @ Q) @ V[b]
                if a != b:
                    resid = resid - psd_sqrt(W[a])
            value += float(np.sum(np.abs(resid) ** 2))
            grad += np.sum((A1.conj().T @ resid) * A2.conj(), axis=1)
    return QuadraticForm(hermitian(sigma), grad, phase.copy(), value)


def mm_direction(form: QuadraticForm, phi_current: np.ndarray) -> np.ndarray:
    """``q = (lambda_max I - Sigma) phi - conj(s)``."""
    return form.lambda_max * phi_current - form.gradient_at(phi_current)


def mm_phase_update(q: np.ndarray, phi_previous: np.ndarray | None = None) -> np.ndarray:
    """Unit-modulus maximizer of ``Re(phi^H q)``; zero entries keep their old phase."""
    q = np.asarray(q, dtype=complex)
    mag = np.abs(q)
    if phi_previous is None:
        phi = np.ones_like(q)
    else:
        phi = np.asarray(phi_previous, dtype=complex).copy()
    nz = mag > 0
    phi[nz] = q[nz] / mag[nz]
    return phi


@dataclass
class MMResult:
    phi: np.ndarray
    objective: list[float]
    iterations: int
    converged: bool


def optimize_irs(form: QuadraticForm, phi_init: np.ndarray, eps: float = 1e-4,
                 max_iters: int = 50) -> MMResult:
    """Run MM iterations until the relative objective change drops to ``eps``.

    The objective is nonincreasing; if ``max_iters`` is hit the best iterate
    is returned with ``converged=False``.
    """
    phi = np.asarray(phi_init, dtype=complex)
    f_old = form(phi)
    history = [f_old]
    best_phi, best_f = phi, f_old
    for n in range(1, max_iters + 1):
        phi_new = mm_phase_update(mm_direction(form, phi), phi)
        f_new = form(phi_new)
        history.append(f_new)
        if f_new <= best_f:
            best_phi, best_f = phi_new, f_new
        change = abs(f_new - f_old)
        phi, f_old = phi_new, f_new
        if change <= eps * abs(f_new) or change == 0.0:
            return MMResult(best_phi, history, n, True)
    return MMResult(best_phi, history, max_iters, False)
