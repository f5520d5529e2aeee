"""Closed-form error analysis and scheme-comparison metrics.

Bit errors come in two kinds. A code-index error happens when a noise
branch of the correlator bank beats the transmitted one; a BPSK error when
the transmitted branch is detected with the wrong sign.  Conditioned on the
beamforming gain ``beta`` both are Gaussian tail probabilities; averaging
over Rayleigh fading with ``n`` transmit antennas turns each tail into the
standard n-branch diversity expression, and a union bound over the error
targets gives the closed-form BER upper bound computed here.

The chip SNR used everywhere is Ec/N0 (linear) at unit total transmit chip
energy.  The bound depends on the per-user fading variances only through
the power normalization coefficient, so all users share one bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import special

__all__ = [
    "q_function",
    "conditional_pep",
    "BoundParams",
    "upper_bound_ber",
    "rayleigh_diversity_tail",
    "rates",
    "SpectrumUtilization",
    "spectrum_utilization",
    "max_users",
    "ComparisonReport",
    "comparison_report",
    "eb_db_from_chip_snr_db",
    "chip_snr_db_from_eb_db",
]


def q_function(x):
    """Gaussian tail probability Q(x), vectorized."""
    return 0.5 * special.erfc(np.asarray(x, dtype=np.float64) / np.sqrt(2.0))


def conditional_pep(beta: float, code_length: int, chip_snr: float, kind: str) -> float:
    """Pairwise error probability conditioned on the beamforming gain.

    kind="index": one correlator noise branch mistaken for the transmitted
    one, Q(sqrt(beta^2 * L * snr / 2)).  kind="bpsk": sign error on the
    transmitted branch, Q(sqrt(2 * beta^2 * L * snr)); its squared argument
    is 4x the index one.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if code_length < 1:
        raise ValueError(f"code_length must be >= 1, got {code_length}")
    if chip_snr <= 0:
        raise ValueError(f"chip_snr must be positive, got {chip_snr}")
    base = beta * beta * code_length * chip_snr
    if kind == "index":
        return float(q_function(math.sqrt(base / 2.0)))
    if kind == "bpsk":
        return float(q_function(math.sqrt(2.0 * base)))
    raise ValueError(f"kind must be 'index' or 'bpsk', got {kind!r}")


def rayleigh_diversity_tail(branch_snr: float, diversity: int) -> float:
    """E[Q(sqrt(2 * branch_snr * G))] for G a sum of ``diversity`` unit-mean
    exponential fading gains (the classic n-branch diversity integral).

    Computed as ((1-mu)/2)^n * sum_{j<n} C(n-1+j, j) ((1+mu)/2)^j with
    mu = sqrt(snr / (1 + snr)); (1-mu) is evaluated cancellation-free.
    """
    if branch_snr < 0:
        raise ValueError(f"branch_snr must be >= 0, got {branch_snr}")
    if diversity < 1:
        raise ValueError(f"diversity must be >= 1, got {diversity}")
    mu = math.sqrt(branch_snr / (1.0 + branch_snr))
    half_lo = 0.5 / ((1.0 + branch_snr) * (1.0 + mu))   # == (1 - mu) / 2
    half_hi = 0.5 * (1.0 + mu)
    acc = 0.0
    for j in range(diversity):
        acc += math.comb(diversity - 1 + j, j) * half_hi**j
    return half_lo**diversity * acc


@dataclass(frozen=True)
class BoundParams:
    """Inputs of the closed-form BER upper bound."""

    num_tx_antennas: int
    codes_per_user: int
    code_length: int
    power_coeff: float
    chip_snr: float   # Ec/N0, linear

    def __post_init__(self) -> None:
        if self.num_tx_antennas < 1:
            raise ValueError(f"num_tx_antennas must be >= 1, got {self.num_tx_antennas}")
        n_c = self.codes_per_user
        if n_c < 2 or n_c & (n_c - 1):
            raise ValueError(f"codes_per_user must be a power of 2 >= 2, got {n_c}")
        if self.code_length < 1:
            raise ValueError(f"code_length must be >= 1, got {self.code_length}")
        if not 0.0 < self.power_coeff <= 1.0:
            raise ValueError(f"power_coeff must be in (0, 1], got {self.power_coeff}")
        if self.chip_snr <= 0:
            raise ValueError(f"chip_snr must be positive, got {self.chip_snr}")


def upper_bound_ber(params: BoundParams) -> float:
    """Closed-form fading-averaged BER upper bound.

    The union bound counts codes_per_user index-error terms at a quarter of
    the branch SNR of the single BPSK term:

        bound = N_c * T(gain / 4) + T(gain),  gain = P * L_c * chip_snr

    with T the diversity tail over the transmit antennas.  Values above 1
    are returned as-is (the bound is loose at low SNR).
    """
    gain = params.power_coeff * params.code_length * params.chip_snr
    tail_index = rayleigh_diversity_tail(gain / 4.0, params.num_tx_antennas)
    tail_bpsk = rayleigh_diversity_tail(gain, params.num_tx_antennas)
    return params.codes_per_user * tail_index + tail_bpsk


def rates(index_bits: int, num_users: int) -> tuple[int, tuple[int, int]]:
    """Per-user rate and the base-station sum-rate range, bits per channel use.

    Every user carries 2*index_bits + 2 bits.  The BS sum rate spans
    [2*index_bits*num_users + 2, num_users*(2*index_bits + 2)]: the lower
    end when the two BPSK bits are broadcast (shared by all users), the
    upper end when every user gets private BPSK bits (unicast).
    """
    m = int(index_bits)
    n_u = int(num_users)
    if m < 1:
        raise ValueError(f"index_bits must be >= 1, got {index_bits}")
    if n_u < 1:
        raise ValueError(f"num_users must be >= 1, got {num_users}")
    per_user = 2 * m + 2
    return per_user, (2 * m * n_u + 2, n_u * per_user)


@dataclass(frozen=True)
class SpectrumUtilization:
    """Bits per chip for this scheme vs a conventional multi-antenna downlink."""

    ue_grcim: Fraction
    bs_grcim: Fraction
    ue_sdma: tuple[int, ...]
    bs_sdma: int
    grcim_bs_lower: bool


def spectrum_utilization(
    index_bits: int,
    num_users: int,
    code_length: int,
    bs_rate: int,
    sdma_private_bits: Sequence[int],
    sdma_common_bits: Sequence[int],
) -> SpectrumUtilization:
    """Exact (rational) spectrum utilization comparison.

    The spread downlink pays a factor code_length in chips per symbol, so
    per-user utilization is (2*index_bits + 2) / code_length and the BS
    total is bs_rate / code_length.  A conventional downlink sends one
    symbol per channel use per user, so its per-user utilization is just
    the per-user bit count private + common.
    """
    m = int(index_bits)
    per_user, (lo, hi) = rates(m, num_users)
    if code_length < 1:
        raise ValueError(f"code_length must be >= 1, got {code_length}")
    if not lo <= bs_rate <= hi:
        raise ValueError(
            f"bs_rate {bs_rate} outside the feasible range [{lo}, {hi}] "
            f"for index_bits={m}, num_users={num_users}"
        )
    if len(sdma_private_bits) != num_users or len(sdma_common_bits) != num_users:
        raise ValueError("need one private and one common bit count per user")
    if any(b < 0 for b in sdma_private_bits) or any(b < 0 for b in sdma_common_bits):
        raise ValueError("per-user bit counts must be non-negative")
    ue_sdma = tuple(int(p) + int(c) for p, c in zip(sdma_private_bits, sdma_common_bits))
    bs_sdma = sum(ue_sdma)
    bs_grcim = Fraction(int(bs_rate), code_length)
    return SpectrumUtilization(
        ue_grcim=Fraction(per_user, code_length),
        bs_grcim=bs_grcim,
        ue_sdma=ue_sdma,
        bs_sdma=bs_sdma,
        grcim_bs_lower=bool(bs_grcim < bs_sdma),
    )


def max_users(code_length: int, codes_per_user: int, num_tx_antennas: int) -> tuple[int, int]:
    """Supported simultaneous users: code-partition limit vs antenna limit.

    The spread scheme fits floor(code_length / codes_per_user) users (all
    code_length of them when codes_per_user is 1); a conventional
    beamformed downlink is limited by its num_tx_antennas.
    """
    if code_length < 1:
        raise ValueError(f"code_length must be >= 1, got {code_length}")
    if codes_per_user < 1 or codes_per_user & (codes_per_user - 1):
        raise ValueError(f"codes_per_user must be a power of 2 >= 1, got {codes_per_user}")
    if num_tx_antennas < 1:
        raise ValueError(f"num_tx_antennas must be >= 1, got {num_tx_antennas}")
    return code_length // codes_per_user, num_tx_antennas


@dataclass(frozen=True)
class ComparisonReport:
    """All closed-form comparison metrics for one configuration."""

    rate_ue: int
    rate_bs_broadcast: int
    rate_bs_unicast: int
    utilization: SpectrumUtilization
    max_users_grcim: int
    max_users_sdma: int


def comparison_report(
    index_bits: int,
    num_users: int,
    code_length: int,
    num_tx_antennas: int,
    bs_rate: int | None = None,
    sdma_private_bits: Sequence[int] | None = None,
    sdma_common_bits: Sequence[int] | None = None,
) -> ComparisonReport:
    """Assemble the full comparison table for one configuration.

    Defaults: broadcast BS rate, and a conventional downlink matching this
    scheme's per-user bit split (2*index_bits private + 2 common each).
    """
    per_user, (lo, hi) = rates(index_bits, num_users)
    if bs_rate is None:
        bs_rate = lo
    if sdma_private_bits is None:
        sdma_private_bits = [2 * int(index_bits)] * num_users
    if sdma_common_bits is None:
        sdma_common_bits = [2] * num_users
    util = spectrum_utilization(
        index_bits, num_users, code_length, bs_rate,
        sdma_private_bits, sdma_common_bits,
    )
    grcim_cap, sdma_cap = max_users(code_length, 2 ** int(index_bits), num_tx_antennas)
    return ComparisonReport(
        rate_ue=per_user,
        rate_bs_broadcast=lo,
        rate_bs_unicast=hi,
        utilization=util,
        max_users_grcim=grcim_cap,
        max_users_sdma=sdma_cap,
    )


def eb_db_from_chip_snr_db(chip_snr_db: float, bs_rate: int, code_length: int) -> float:
    """Relabel a chip-energy SNR as an information-bit SNR.

    Chip and bit energies relate through the BS spectrum utilization
    Ec = Eb * (bs_rate / code_length); this conversion is for reporting
    only and never feeds back into the simulation.
    """
    if bs_rate < 1 or code_length < 1:
        raise ValueError("bs_rate and code_length must be >= 1")
    return chip_snr_db - 10.0 * math.log10(bs_rate / code_length)


def chip_snr_db_from_eb_db(eb_db: float, bs_rate: int, code_length: int) -> float:
    """Inverse of :func:`eb_db_from_chip_snr_db`."""
    if bs_rate < 1 or code_length < 1:
        raise ValueError("bs_rate and code_length must be >= 1")
    return eb_db + 10.0 * math.log10(bs_rate / code_length)
