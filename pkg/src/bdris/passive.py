"""Passive beamforming: maximize the sum of effective channel gains.

The objective is ``f(Theta) = ||G^H + H^H Theta E||_F^2``. Both relaxed
solvers work over the ball ``||Theta||_F^2 <= N``; ``passive_design`` then
projects onto the architecture's feasible set.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .projections import Architecture, ScatteringMatrix, project

OPTIMAL = "optimal"
LOW_COMPLEXITY = "low_complexity"


def _theta_array(ch: ChannelSet, theta) -> np.ndarray:
    theta = np.asarray(getattr(theta, "theta", theta), dtype=complex)
    if theta.shape != (ch.N, ch.N):
        raise ValueError(f"theta must be {(ch.N, ch.N)}, got {theta.shape}")
    return theta


def sum_channel_gain(ch: ChannelSet, theta) -> float:
    theta = _theta_array(ch, theta)
    R = ch.G_mat.conj().T + ch.H_mat.conj().T @ theta @ ch.E_mat
    return float(np.vdot(R, R).real)


def sum_channel_gain_gradient(ch: ChannelSet, theta) -> np.ndarray:
    """Conjugate (Wirtinger) gradient df/dconj(Theta) = H (G^H + H^H Theta E) E^H.

    The real gradient with respect to Re(Theta) and Im(Theta) is twice the
    real and imaginary parts of this matrix. At Theta = 0 it reduces to
    ``H G^H E^H``, the low-complexity ascent direction.
    """
    theta = _theta_array(ch, theta)
    R = ch.G_mat.conj().T + ch.H_mat.conj().T @ theta @ ch.E_mat
    return ch.H_mat @ R @ ch.E_mat.conj().T


@dataclass
class VectorizedProblem:
    """``f = ||a + A vec(Theta)||^2`` with ``A = E^T kron H^H``, ``a = vec(G^H)``.

    ``vec`` stacks columns. Eigenpairs of ``A^H A`` are sorted descending.
    """

    A_mat: np.ndarray
    a_vec: np.ndarray
    eigvals: np.ndarray
    eigvecs: np.ndarray
    gamma_star: float = np.nan

    @classmethod
    def from_channels(cls, ch: ChannelSet) -> "VectorizedProblem":
        A = np.kron(ch.E_mat.T, ch.H_mat.conj().T)
        a = ch.G_mat.conj().T.reshape(-1, order="F")
        lam, Q = np.linalg.eigh(A.conj().T @ A)
        lam = np.clip(lam[::-1], 0.0, None)
        return cls(A, a, lam, Q[:, ::-1])

    def objective(self, x: np.ndarray) -> float:
        r = self.a_vec + self.A_mat @ x
        return float(np.vdot(r, r).real)


@dataclass
class RelaxedSolution:
    theta: np.ndarray
    method: str
    objective: float
    degenerate: bool = False


def _boundary_maximizer(prob: VectorizedProblem, N: int) -> np.ndarray:
    """Maximize ||a + A x||^2 over ||x||^2 <= N.

    KKT gives ``x = (gamma I - A^H A)^{-1} A^H a`` with ``gamma > lambda_max``
    fixed by ``sum_d |q_d^H A^H a|^2 / (gamma - lambda_d)^2 = N``. The root
    is bracketed in ``t = gamma - lambda_max`` to avoid cancellation.
    """
    lam, Q = prob.eigvals, prob.eigvecs
    b = prob.A_mat.conj().T @ prob.a_vec
    c = Q.conj().T @ b
    w = np.abs(c) ** 2
    lam_max = lam[0]
    gap = lam_max - lam
    b_norm = np.linalg.norm(b)

    top = gap <= 1e-10 * max(lam_max, np.finfo(float).tiny)
    if b_norm == 0.0 or np.all(w[top] <= (1e-24 * b_norm ** 2)):
        # hard case: no weight on the top eigenspace, gamma* may sit at lambda_max
        rest = ~top
        x_rest = Q[:, rest] @ (c[rest] / gap[rest])
        slack = N - np.vdot(x_rest, x_rest).real
        if slack >= 0:
            prob.gamma_star = float(lam_max)
            return x_rest + np.sqrt(slack) * Q[:, 0]

    def sq_norm(t):
        return float(np.sum(w / (gap + t) ** 2))

    hi = b_norm / np.sqrt(N)  # sq_norm(hi) <= ||b||^2 / hi^2 = N
    lo = hi
    while sq_norm(lo) <= N:
        lo *= 0.5
        if lo < 1e-300:
            break
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        val = sq_norm(mid)
        if abs(val - N) <= 1e-10 * N or hi - lo <= 1e-14 * (lam_max + hi):
            break
        if val > N:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    prob.gamma_star = float(lam_max + t)
    x = Q @ (c / (gap + t))
    # the maximizer lies on the sphere; remove the residual bisection error
    return x * (np.sqrt(N) / np.linalg.norm(x))


def relaxed_optimal(ch: ChannelSet, return_problem: bool = False):
    """Optimal solution of the relaxed problem over ``||Theta||_F^2 <= N``.

    Costs an N^2 x N^2 Hermitian eigendecomposition, i.e. O(N^6).
    """
    N = ch.N
    # scaling a and A by one common factor leaves the maximizer unchanged and
    # keeps the eigenvalues O(1) for path-loss-sized channels
    h_norm, e_norm = np.linalg.norm(ch.H_mat), np.linalg.norm(ch.E_mat)
    scaled = ch
    if h_norm > 0 and e_norm > 0:
        scaled = ChannelSet(ch.G_mat / (h_norm * e_norm), ch.H_mat / h_norm,
                            ch.E_mat / e_norm, ch.noise_power)
    prob = VectorizedProblem.from_channels(scaled)
    x = _boundary_maximizer(prob, N)
    theta = x.reshape(N, N, order="F")
    sol = RelaxedSolution(theta, OPTIMAL, sum_channel_gain(ch, theta))
    return (sol, prob) if return_problem else sol


def relaxed_lowcomplexity(ch: ChannelSet) -> RelaxedSolution:
    """One gradient step from Theta = 0 scaled onto the sphere ||Theta||_F^2 = N.

    Theta = sqrt(N) M / ||M||_F with M = H G^H E^H. When M = 0 the identity is
    returned and the solution is flagged degenerate.
    """
    N = ch.N
    M = ch.H_mat @ ch.G_mat.conj().T @ ch.E_mat.conj().T
    m_norm = np.linalg.norm(M)
    if m_norm == 0.0:
        theta = np.eye(N, dtype=complex)
        return RelaxedSolution(theta, LOW_COMPLEXITY, sum_channel_gain(ch, theta), degenerate=True)
    theta = (np.sqrt(N) / m_norm) * M
    return RelaxedSolution(theta, LOW_COMPLEXITY, sum_channel_gain(ch, theta))


def relax(ch: ChannelSet, relaxation: str) -> RelaxedSolution:
    if relaxation == OPTIMAL:
        return relaxed_optimal(ch)
    if relaxation == LOW_COMPLEXITY:
        return relaxed_lowcomplexity(ch)
    raise ValueError(f"unknown relaxation {relaxation!r}")


def passive_design(ch: ChannelSet, arch: Architecture,
                   relaxation: str = LOW_COMPLEXITY) -> ScatteringMatrix:
    """Relax, then project onto the feasible set of ``arch``."""
    arch.block_size(ch.N)
    return project(relax(ch, relaxation).theta, arch)
