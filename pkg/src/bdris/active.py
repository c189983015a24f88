"""BS precoding for a fixed effective channel F (L x K, columns f_k).

Rates are in bit/s/Hz (base-2 logarithm).
"""
from __future__ import annotations

from dataclasses import dataclass, field
import logging

import numpy as np

log = logging.getLogger(__name__)


@dataclass
class Precoder:
    W: np.ndarray
    power_budget: float

    @property
    def power(self) -> float:
        return float(np.vdot(self.W, self.W).real)

    def is_feasible(self, rtol: float = 1e-6) -> bool:
        return self.power <= self.power_budget * (1.0 + rtol)


@dataclass
class FPState:
    """Auxiliary variables of the fractional-programming iteration."""

    aux_sinr: np.ndarray
    aux_quad: np.ndarray
    dual_mu: float = 0.0
    objective_trace: list = field(default_factory=list)
    power_trace: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0


def _W(W) -> np.ndarray:
    return np.asarray(getattr(W, "W", W), dtype=complex)


def sinr_all(F, W, sigma2: float) -> np.ndarray:
    """SINR of every user: |f_k^H w_k|^2 / (sum_{j != k} |f_k^H w_j|^2 + sigma2)."""
    F = np.asarray(F, dtype=complex)
    W = _W(W)
    if F.shape != W.shape:
        raise ValueError(f"F is {F.shape} but W is {W.shape}")
    P = np.abs(F.conj().T @ W) ** 2  # P[k, j] = |f_k^H w_j|^2
    signal = np.diag(P).copy()
    interference = P.sum(axis=1) - signal
    return signal / (interference + sigma2)


def sinr(F, W, k: int, sigma2: float) -> float:
    return float(sinr_all(F, W, sigma2)[k])


def sum_rate(F, W, sigma2: float) -> float:
    return float(np.sum(np.log2(1.0 + sinr_all(F, W, sigma2))))


def rzf_beamforming(F, P_t: float, sigma2: float) -> Precoder:
    """W = F (F^H F + eta I)^{-1} with eta = K sigma2 / P_t, scaled to full power."""
    F = np.asarray(F, dtype=complex)
    if not P_t > 0:
        raise ValueError("P_t must be positive")
    if not np.any(F):
        raise ValueError("effective channel is identically zero")
    K = F.shape[1]
    eta = K * sigma2 / P_t
    W0 = F @ np.linalg.inv(F.conj().T @ F + eta * np.eye(K))
    W = W0 * (np.sqrt(P_t) / np.linalg.norm(W0))
    return Precoder(W, P_t)


def _solve_precoder(F, quad, gain, P_t):
    """Maximize the quadratic-transform surrogate in W under ||W||_F^2 <= P_t.

    ``w_k = gain_k * quad_k * (B + mu I)^{-1} f_k`` with
    ``B = sum_j |quad_j|^2 f_j f_j^H``; mu is the power dual variable.
    """
    B = (F * np.abs(quad) ** 2) @ F.conj().T
    d, U = np.linalg.eigh(B)
    d = np.clip(d, 0.0, None)
    C = U.conj().T @ (F * (gain * quad))
    row_w = np.sum(np.abs(C) ** 2, axis=1)
    # components of C outside range(B) vanish up to rounding
    keep = d > d.max() * 1e-13 if d.max() > 0 else np.zeros_like(d, dtype=bool)
    null_w = row_w[~keep].sum()
    d_keep, w_keep = d[keep], row_w[keep]

    def power(mu):
        p = np.sum(w_keep / (d_keep + mu) ** 2)
        if null_w > 0:
            p += null_w / mu ** 2 if mu > 0 else np.inf
        return p

    mu = 0.0
    if null_w > 0 or power(0.0) > P_t:
        lo = 0.0
        hi = max(np.sum(np.abs(quad) ** 2) * np.linalg.norm(F) ** 2 / np.sqrt(P_t), 1e-300)
        while power(hi) > P_t:
            lo, hi = hi, 2.0 * hi
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if power(mid) > P_t:
                lo = mid
            else:
                hi = mid
            if P_t - power(hi) <= 1e-13 * P_t:
                break
        mu = hi
    coeff = np.zeros_like(C)
    coeff[keep] = C[keep] / (d_keep + mu)[:, None]
    if mu > 0:
        coeff[~keep] = C[~keep] / mu
    return U @ coeff, mu


def fp_beamforming(F, P_t: float, sigma2: float, tol: float = 1e-3, max_iter: int = 200,
                   W0=None):
    """Sum-rate maximization by fractional programming (quadratic transform).

    Each iteration sets the SINR auxiliaries to the current SINRs, the
    quadratic-transform auxiliaries to their closed-form optimum, then solves
    for W with a bisection on the power dual variable. The sum-rate is
    monotonically non-decreasing across iterations. Initialized with RZF
    unless ``W0`` is given.

    Returns
    -------
    precoder : Precoder
        Best iterate found.
    state : FPState
        Final auxiliaries and the sum-rate / power trace (entry 0 is the
        initial point).
    """
    F = np.asarray(F, dtype=complex)
    if not P_t > 0:
        raise ValueError("P_t must be positive")
    W = rzf_beamforming(F, P_t, sigma2).W if W0 is None else _W(W0).copy()
    K = F.shape[1]
    state = FPState(np.zeros(K), np.zeros(K, dtype=complex))
    rate = sum_rate(F, W, sigma2)
    state.objective_trace.append(rate)
    state.power_trace.append(float(np.vdot(W, W).real))
    best_W, best_rate = W, rate

    for it in range(1, max_iter + 1):
        alpha = sinr_all(F, W, sigma2)
        FW = F.conj().T @ W
        total = np.sum(np.abs(FW) ** 2, axis=1) + sigma2
        gain = np.sqrt(1.0 + alpha)
        quad = gain * np.diag(FW) / total
        W, mu = _solve_precoder(F, quad, gain, P_t)
        state.aux_sinr, state.aux_quad, state.dual_mu = alpha, quad, float(mu)
        state.iterations = it
        new_rate = sum_rate(F, W, sigma2)
        state.objective_trace.append(new_rate)
        state.power_trace.append(float(np.vdot(W, W).real))
        if new_rate > best_rate:
            best_W, best_rate = W, new_rate
        if abs(new_rate - rate) <= tol * max(abs(rate), np.finfo(float).tiny):
            state.converged = True
            break
        rate = new_rate

    if not state.converged:
        log.warning("FP did not converge within %d iterations", max_iter)
    return Precoder(best_W, P_t), state
