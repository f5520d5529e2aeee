"""Bit mapping, chip-level modulation and correlator-bank detection.

Each channel use carries ``2*m + 2`` bits per user: ``m`` bits select the
in-phase spreading code, ``m`` bits select the quadrature one, and one BPSK
bit rides on each rail.  Bit layout of a word, MSB first:

    [m index-I bits][m index-Q bits][BPSK-I bit][BPSK-Q bit]

Index bits are natural binary, most significant bit first.  BPSK label 0
maps to +1/sqrt(2) and label 1 to -1/sqrt(2), so a chip vector always has
squared norm equal to the code length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .codebook import WalshCodebook
from .errors import FramingError

__all__ = [
    "BPSK_AMPLITUDE",
    "CimSymbol",
    "CorrelatorBank",
    "bits_to_symbol",
    "symbol_to_bits",
    "bpsk_value",
    "modulate",
    "correlate",
    "ml_detect",
]

BPSK_AMPLITUDE = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class CimSymbol:
    """One channel use for one user: two code indices and two BPSK labels."""

    n_i: int
    n_q: int
    l_i: int
    l_q: int

    def __post_init__(self) -> None:
        for name in ("n_i", "n_q"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
        for name in ("l_i", "l_q"):
            v = getattr(self, name)
            if v not in (0, 1):
                raise ValueError(f"{name} must be 0 or 1, got {v!r}")


@dataclass(frozen=True)
class CorrelatorBank:
    """Per-rail correlator outputs against one user's code subset."""

    r_i: np.ndarray
    r_q: np.ndarray

    def __post_init__(self) -> None:
        if np.shape(self.r_i) != np.shape(self.r_q) or np.ndim(self.r_i) != 1:
            raise ValueError("r_i and r_q must be 1-D arrays of equal length")


def bpsk_value(label: int) -> float:
    """Map BPSK label 0/1 to +/- 1/sqrt(2)."""
    if label not in (0, 1):
        raise ValueError(f"BPSK label must be 0 or 1, got {label!r}")
    return BPSK_AMPLITUDE if label == 0 else -BPSK_AMPLITUDE


def bits_to_symbol(bits: Sequence[int], index_bits: int) -> CimSymbol:
    """Pack a word of 2*index_bits + 2 bits into a symbol."""
    m = int(index_bits)
    if m < 1:
        raise ValueError(f"index_bits must be >= 1, got {index_bits}")
    word = list(bits)
    if len(word) != 2 * m + 2:
        raise FramingError(f"expected a word of {2 * m + 2} bits, got {len(word)}")
    if any(b not in (0, 1) for b in word):
        raise FramingError(f"bits must be 0/1, got {word}")
    n_i = 0
    for b in word[:m]:
        n_i = (n_i << 1) | b
    n_q = 0
    for b in word[m:2 * m]:
        n_q = (n_q << 1) | b
    return CimSymbol(n_i=n_i, n_q=n_q, l_i=word[2 * m], l_q=word[2 * m + 1])


def symbol_to_bits(symbol: CimSymbol, index_bits: int) -> list[int]:
    """Inverse of :func:`bits_to_symbol`."""
    m = int(index_bits)
    if m < 1:
        raise ValueError(f"index_bits must be >= 1, got {index_bits}")
    if symbol.n_i >= (1 << m) or symbol.n_q >= (1 << m):
        raise ValueError(
            f"code index out of range for {m} index bits: "
            f"n_i={symbol.n_i}, n_q={symbol.n_q}"
        )
    word = [(symbol.n_i >> (m - 1 - j)) & 1 for j in range(m)]
    word += [(symbol.n_q >> (m - 1 - j)) & 1 for j in range(m)]
    word += [symbol.l_i, symbol.l_q]
    return word


def modulate(
    symbol: CimSymbol,
    user_rows: Sequence[int],
    codebook: WalshCodebook,
) -> np.ndarray:
    """Spread one symbol onto the user's codes.

    Returns the complex chip vector  c[n_i]*s(l_i) + 1j*c[n_q]*s(l_q),
    where c[.] are the rows of ``codebook`` selected by ``user_rows``.
    """
    rows = list(user_rows)
    n_codes = len(rows)
    if symbol.n_i >= n_codes or symbol.n_q >= n_codes:
        raise ValueError(
            f"code index out of range: n_i={symbol.n_i}, n_q={symbol.n_q}, "
            f"subset has {n_codes} codes"
        )
    code_i = codebook.matrix[rows[symbol.n_i]].astype(np.float64)
    code_q = codebook.matrix[rows[symbol.n_q]].astype(np.float64)
    return code_i * bpsk_value(symbol.l_i) + 1j * (code_q * bpsk_value(symbol.l_q))


def correlate(
    received: np.ndarray,
    user_rows: Sequence[int],
    codebook: WalshCodebook,
) -> CorrelatorBank:
    """Despread one received chip vector against the user's code subset."""
    received = np.asarray(received)
    if received.ndim != 1 or received.shape[0] != codebook.length:
        raise FramingError(
            f"received frame must have {codebook.length} chips, "
            f"got shape {received.shape}"
        )
    codes = codebook.matrix[list(user_rows)].astype(np.float64)
    return CorrelatorBank(
        r_i=codes @ received.real,
        r_q=codes @ received.imag,
    )


def _detect_rail_peak(rail: np.ndarray) -> tuple[int, int]:
    # Largest-magnitude branch wins; sign picks the BPSK label.  Ties go to
    # the lowest branch index, and a zero peak to label 0.
    idx = int(np.argmax(np.abs(rail)))
    label = 1 if rail[idx] < 0 else 0
    return idx, label


def _detect_rail_argmin(rail: np.ndarray, amplitude: float) -> tuple[int, int]:
    # Literal squared-distance search over (branch, label) pairs, kept for
    # cross-checking the peak rule.  C-order flattening means ties resolve
    # to the lowest branch index then label 0.
    cost = np.stack(((rail - amplitude) ** 2, (rail + amplitude) ** 2), axis=1)
    flat = int(np.argmin(cost))
    return flat >> 1, flat & 1


def ml_detect(bank: CorrelatorBank, beta: float, code_length: int) -> CimSymbol:
    """Maximum-likelihood detection of one symbol from a correlator bank.

    Per rail, picks the (branch, BPSK label) pair whose nominal output
    ``beta * code_length * s(label)`` is most likely to have produced the
    bank: the branch with the largest magnitude, with the label matching
    its sign.  Ties break to the lowest branch index, then label 0.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if code_length < 1:
        raise ValueError(f"code_length must be >= 1, got {code_length}")
    n_i, l_i = _detect_rail_peak(bank.r_i)
    n_q, l_q = _detect_rail_peak(bank.r_q)
    return CimSymbol(n_i=n_i, n_q=n_q, l_i=l_i, l_q=l_q)
