"""Projections onto the feasible sets of the three BD-RIS architectures.

* fully connected:  Theta = Theta^T and Theta Theta^H = I
* group connected:  block diagonal, each block symmetric unitary
* single connected: diagonal with unit-modulus entries
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class Architecture:
    """BD-RIS circuit topology.

    ``kind`` is one of ``"fully"``, ``"group"`` or ``"single"``; ``group_size``
    is only meaningful for ``"group"``.
    """

    kind: str
    group_size: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("fully", "group", "single"):
            raise ValueError(f"unknown architecture {self.kind!r}")
        if self.kind == "group":
            if self.group_size is None or self.group_size <= 0:
                raise ValueError("group-connected architecture needs a positive group_size")
        elif self.group_size is not None:
            raise ValueError("group_size is only valid for the group architecture")

    @classmethod
    def fully_connected(cls) -> "Architecture":
        return cls("fully")

    @classmethod
    def group_connected(cls, group_size: int) -> "Architecture":
        return cls("group", int(group_size))

    @classmethod
    def single_connected(cls) -> "Architecture":
        return cls("single")

    def block_size(self, N: int) -> int:
        """Size of the diagonal blocks for an N-element surface."""
        if self.kind == "fully":
            return N
        if self.kind == "single":
            return 1
        if N % self.group_size:
            raise ValueError(f"group_size={self.group_size} does not divide N={N}")
        return self.group_size

    @property
    def short_name(self) -> str:
        if self.kind == "group":
            return f"GC{self.group_size}"
        return {"fully": "FC", "single": "SC"}[self.kind]


def _square(Z) -> np.ndarray:
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {Z.shape}")
    return Z


def sym(Z) -> np.ndarray:
    """Closest complex-symmetric matrix: (Z + Z^T) / 2."""
    Z = _square(Z)
    return 0.5 * (Z + Z.T)


def uni(Z) -> np.ndarray:
    """Closest unitary matrix U V^H from the SVD Z = U S V^H."""
    Z = _square(Z)
    U, _, Vh = np.linalg.svd(Z)
    return U @ Vh


def numerical_rank(s: np.ndarray, N: int) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > N * s[0] * 1e-12))


def _symuni_array(Z: np.ndarray) -> np.ndarray:
    X = sym(Z)
    N = X.shape[0]
    U, s, Vh = np.linalg.svd(X)
    R = numerical_rank(s, N)
    if R == 0:
        # every symmetric unitary matrix is equally close; pick U = V = I
        return np.eye(N, dtype=complex)
    if R < N:
        # complete U_R with conj(V_{N-R}) so the product stays symmetric
        V = Vh.conj().T
        U = np.concatenate([U[:, :R], V[:, R:].conj()], axis=1)
    return U @ Vh


@dataclass
class ScatteringMatrix:
    """An N x N scattering matrix tagged with its architecture."""

    theta: np.ndarray
    arch: Architecture

    @property
    def N(self) -> int:
        return self.theta.shape[0]

    def residuals(self) -> dict:
        """Frobenius-norm violations of each feasibility condition."""
        theta = self.theta
        N = self.N
        b = self.arch.block_size(N)
        mask = np.kron(np.eye(N // b), np.ones((b, b))).astype(bool)
        return {
            "symmetry": float(np.linalg.norm(theta - theta.T)),
            "unitarity": float(np.linalg.norm(theta @ theta.conj().T - np.eye(N))),
            "structure": float(np.linalg.norm(theta[~mask])),
        }

    def is_feasible(self, tol: float = FEASIBILITY_TOL) -> bool:
        return all(v <= tol for v in self.residuals().values())

    @property
    def feasible(self) -> bool:
        return self.is_feasible()


def symuni(Z) -> ScatteringMatrix:
    """Closest symmetric unitary matrix to Z in Frobenius norm.

    Computes the SVD ``sym(Z) = U S V^H`` and returns ``[U_R, conj(V_{N-R})] V^H``
    where R is the numerical rank of ``sym(Z)``. The result is invariant to
    positive scaling of Z.
    """
    return ScatteringMatrix(_symuni_array(_square(Z)), Architecture.fully_connected())


def block_diagonalize(Z, group_size: int) -> list[np.ndarray]:
    """Return the N / group_size diagonal blocks of Z, in order."""
    Z = _square(Z)
    N = Z.shape[0]
    if group_size <= 0 or N % group_size:
        raise ValueError(f"group_size={group_size} does not divide N={N}")
    return [Z[i:i + group_size, i:i + group_size].copy()
            for i in range(0, N, group_size)]


def project_group(Z, group_size: int) -> ScatteringMatrix:
    blocks = block_diagonalize(Z, group_size)
    N = len(blocks) * group_size
    theta = np.zeros((N, N), dtype=complex)
    for g, X in enumerate(blocks):
        sl = slice(g * group_size, (g + 1) * group_size)
        theta[sl, sl] = _symuni_array(X)
    return ScatteringMatrix(theta, Architecture.group_connected(group_size))


def project_single(Z) -> ScatteringMatrix:
    """Unit-modulus diagonal carrying the phases of diag(Z); zero entries map to 1."""
    z = np.diag(_square(Z))
    phase = np.where(z == 0, 0.0, np.angle(z))  # angle(-0+0j) would be pi
    theta = np.diag(np.exp(1j * phase))
    return ScatteringMatrix(theta, Architecture.single_connected())


def project(Z, arch: Architecture) -> ScatteringMatrix:
    """Dispatch to the projection matching ``arch``."""
    if arch.kind == "fully":
        return symuni(Z)
    if arch.kind == "single":
        return project_single(Z)
    return project_group(Z, arch.group_size)
