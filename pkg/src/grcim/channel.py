"""Multi-antenna downlink: fading, beamforming and noise.

Channel model
-------------
Each user k sees an i.i.d. circularly-symmetric complex Gaussian channel
vector ``h_k`` whose entries have total variance ``sigma_k^2`` (half per
real rail).  The base station beamforms toward each user with

    w_k = beta_k * h_k / ||h_k||^2,   beta_k = sqrt(P * ||h_k||^2 / sigma_k^2)

where the normalization coefficient ``P = 1 / sum_i(1 / sigma_i^2)`` makes
the expected total transmit power exactly one and gives every user the same
effective-gain statistics regardless of its variance (fairness).  The
useful gain seen by user k is then ``h_k^H w_k = beta_k`` exactly.

Noise convention
----------------
``noise_density`` (N0) is the variance of one complex noise sample per
chip: each real rail carries variance N0/2.  The chip SNR axis used by the
simulator and the analysis module is Ec/N0 with unit total transmit chip
energy, i.e. N0 = 1 / (Ec/N0 linear).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError

__all__ = [
    "SystemConfig",
    "ChannelRealization",
    "ReceivedFrame",
    "draw_channel",
    "zf_precode",
    "apply_channel",
]

_TRAFFIC_MODES = ("broadcast", "unicast")


@dataclass(frozen=True)
class SystemConfig:
    """Static description of one downlink configuration.

    fading_variances holds one per-user variance sigma_k^2; its length
    fixes the number of users.
    """

    num_tx_antennas: int
    num_users: int
    code_length: int
    codes_per_user: int
    fading_variances: tuple[float, ...]
    traffic_mode: str = "broadcast"

    def __post_init__(self) -> None:
        if self.num_tx_antennas < 1:
            raise ValueError(f"num_tx_antennas must be >= 1, got {self.num_tx_antennas}")
        if self.num_users < 1:
            raise ValueError(f"num_users must be >= 1, got {self.num_users}")
        if self.code_length < 1 or self.code_length & (self.code_length - 1):
            raise ValueError(f"code_length must be a power of 2, got {self.code_length}")
        n_c = self.codes_per_user
        if n_c < 2 or n_c & (n_c - 1):
            raise ValueError(
                f"codes_per_user must be a power of 2 and >= 2, got {n_c}"
            )
        if self.num_users * n_c > self.code_length:
            raise CapacityError(
                f"{self.num_users} users x {n_c} codes per user exceed "
                f"code length {self.code_length}"
            )
        if len(self.fading_variances) != self.num_users:
            raise ValueError(
                f"need one fading variance per user: got "
                f"{len(self.fading_variances)} for {self.num_users} users"
            )
        if any(v <= 0 for v in self.fading_variances):
            raise ValueError(f"fading variances must be positive, got {self.fading_variances}")
        if self.traffic_mode not in _TRAFFIC_MODES:
            raise ValueError(
                f"traffic_mode must be one of {_TRAFFIC_MODES}, got {self.traffic_mode!r}"
            )

    @property
    def index_bits(self) -> int:
        """Number of code-index bits per rail (log2 of codes_per_user)."""
        return int(self.codes_per_user).bit_length() - 1

    @property
    def bits_per_symbol(self) -> int:
        """Bits per channel use per user: 2*index_bits + 2."""
        return 2 * self.index_bits + 2

    @property
    def power_coeff(self) -> float:
        """Fairness normalization P = 1 / sum_k(1 / sigma_k^2)."""
        return 1.0 / sum(1.0 / v for v in self.fading_variances)


@dataclass(frozen=True)
class ChannelRealization:
    """One block-fading draw: channels plus the derived beamforming gains."""

    h: np.ndarray               # (num_users, num_tx_antennas) complex
    power_factors: np.ndarray   # (num_users,) real, beta_k
    power_coeff: float          # P shared by all users

    @property
    def num_users(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True)
class ReceivedFrame:
    """Per-user received chip vectors for one channel use."""

    signals: np.ndarray   # (num_users, code_length) complex
    noise_density: float


def draw_channel(config: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one block-fading realization and its beamforming gains."""
    sigma2 = np.asarray(config.fading_variances, dtype=np.float64)
    shape = (config.num_users, config.num_tx_antennas)
    h = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    h *= np.sqrt(sigma2 / 2.0)[:, None]
    norm2 = np.sum(np.abs(h) ** 2, axis=1)
    if np.any(norm2 == 0.0):
        raise ValueError("degenerate channel draw: a user has zero channel norm")
    p = config.power_coeff
    beta = np.sqrt(p * norm2 / sigma2)
    return ChannelRealization(h=h, power_factors=beta, power_coeff=p)


def zf_precode(realization: ChannelRealization, chips: np.ndarray) -> np.ndarray:
    """Superpose per-user beamformed chip streams into one transmit frame.

    ``chips`` has one row per user.  Returns the (num_tx_antennas,
    code_length) frame  sum_k w_k * chips_k  with w_k = beta_k h_k/||h_k||^2.
    """
    chips = np.asarray(chips)
    n_users = realization.num_users
    if chips.ndim != 2 or chips.shape[0] != n_users:
        raise ValueError(
            f"chips must be (num_users, code_length), got {chips.shape} "
            f"for {n_users} users"
        )
    norm2 = np.sum(np.abs(realization.h) ** 2, axis=1)
    if np.any(norm2 == 0.0):
        raise ValueError("degenerate channel: zero norm, beamformer undefined")
    weights = (realization.power_factors / norm2)[:, None] * realization.h
    return np.einsum("kt,kc->tc", weights, chips)


def apply_channel(
    frame: np.ndarray,
    realization: ChannelRealization,
    noise_density: float,
    rng: np.random.Generator,
) -> ReceivedFrame:
    """Propagate a transmit frame to every user and add receiver noise.

    User k receives  h_k^H frame + n_k  where each complex noise sample has
    variance ``noise_density`` (noise_density/2 per real rail).
    """
    frame = np.asarray(frame)
    n_users, n_tx = realization.h.shape
    if frame.ndim != 2 or frame.shape[0] != n_tx:
        raise ValueError(
            f"frame must be (num_tx_antennas, code_length), got {frame.shape}"
        )
    if noise_density < 0:
        raise ValueError(f"noise_density must be >= 0, got {noise_density}")
    signals = np.einsum("kt,tc->kc", realization.h.conj(), frame)
    if noise_density > 0:
        shape = (n_users, frame.shape[1])
        noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        signals = signals + noise * np.sqrt(noise_density / 2.0)
    return ReceivedFrame(signals=signals, noise_density=float(noise_density))
