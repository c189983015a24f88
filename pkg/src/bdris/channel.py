"""Channel realizations and effective channels for the BD-RIS aided MU-MISO link.

Large-scale fading follows ``zeta(d) = zeta0 * d**(-gamma)``; small-scale
fading is i.i.d. Rayleigh. All matrices use the column-per-user convention:

    G : (L, K)  BS -> user k in column k
    H : (N, K)  RIS -> user k in column k
    E : (N, L)  BS -> RIS
"""
from __future__ import annotations

from dataclasses import dataclass, fields
import math

import numpy as np


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Simulation parameters. Defaults reproduce the reference scenario
    (L = K = 4, 20 dB transmit SNR, -80 dBm noise, 100 realizations)."""

    L: int = 4
    K: int = 4
    N: int = 16
    group_size: int = 2
    d_bu: float = 150.0
    d_br: float = 50.0 * math.sqrt(2.0)
    d_ru: float = 50.0 * math.sqrt(5.0)
    gamma_bu: float = 3.5
    gamma_br: float = 2.0
    gamma_ru: float = 2.2
    zeta0_db: float = -30.0
    noise_dbm: float = -80.0
    snr_db: float = 20.0
    trials: int = 100
    seed: int = 0

    def __post_init__(self):
        for name in ("L", "K", "N", "group_size", "trials"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        for name in ("d_bu", "d_br", "d_ru"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        for name in ("gamma_bu", "gamma_br", "gamma_ru"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)!r}")
        if self.N % self.group_size:
            raise ValueError(
                f"group_size={self.group_size} does not divide n={self.N}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed!r}")

    @property
    def noise_power(self) -> float:
        """Per-user noise power in watts."""
        return dbm_to_watt(self.noise_dbm)

    @property
    def transmit_power(self) -> float:
        """P_t in watts, reading the transmit SNR as P_t / sigma^2."""
        return self.noise_power * db_to_linear(self.snr_db)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass
class ChannelSet:
    G_mat: np.ndarray
    H_mat: np.ndarray
    E_mat: np.ndarray
    noise_power: float = 1.0

    def __post_init__(self):
        self.G_mat = np.atleast_2d(np.asarray(self.G_mat, dtype=complex))
        self.H_mat = np.atleast_2d(np.asarray(self.H_mat, dtype=complex))
        self.E_mat = np.atleast_2d(np.asarray(self.E_mat, dtype=complex))
        L, K = self.G_mat.shape
        if self.H_mat.shape[1] != K:
            raise ValueError(f"H_mat has {self.H_mat.shape[1]} users, G_mat has {K}")
        if self.E_mat.shape != (self.H_mat.shape[0], L):
            raise ValueError(
                f"E_mat must be {(self.H_mat.shape[0], L)}, got {self.E_mat.shape}")
        if self.noise_power < 0:
            raise ValueError("noise_power must be non-negative")

    @property
    def L(self) -> int:
        return self.G_mat.shape[0]

    @property
    def K(self) -> int:
        return self.G_mat.shape[1]

    @property
    def N(self) -> int:
        return self.H_mat.shape[0]


def path_loss(d: float, gamma: float, zeta0_db: float) -> float:
    """Linear power gain ``10**(zeta0_db/10) * d**(-gamma)``."""
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d!r}")
    return db_to_linear(zeta0_db) * d ** (-gamma)


def complex_gaussian(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    """CN(0, variance) entries: real and imaginary parts each N(0, variance/2)."""
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    # counter-based: any (seed, trial) pair maps to its own stream
    return np.random.default_rng([int(seed), int(trial_index)])


def sample_channels(config: ScenarioConfig, trial_index: int) -> ChannelSet:
    rng = trial_rng(config.seed, trial_index)
    L, K, N = config.L, config.K, config.N
    G = complex_gaussian(rng, (L, K), path_loss(config.d_bu, config.gamma_bu, config.zeta0_db))
    H = complex_gaussian(rng, (N, K), path_loss(config.d_ru, config.gamma_ru, config.zeta0_db))
    E = complex_gaussian(rng, (N, L), path_loss(config.d_br, config.gamma_br, config.zeta0_db))
    return ChannelSet(G, H, E, config.noise_power)


def effective_channel(ch: ChannelSet, theta) -> np.ndarray:
    """Return F (L x K) with columns f_k, where f_k^H = g_k^H + h_k^H Theta E."""
    theta = np.asarray(getattr(theta, "theta", theta), dtype=complex)
    if theta.shape != (ch.N, ch.N):
        raise ValueError(f"theta must be {(ch.N, ch.N)}, got {theta.shape}")
    return ch.G_mat + ch.E_mat.conj().T @ theta.conj().T @ ch.H_mat
