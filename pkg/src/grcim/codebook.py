"""Walsh-Hadamard spreading codebook and per-user code grouping.

The codebook is the set of rows of a Sylvester-type Hadamard matrix with
entries +1/-1.  Distinct rows are exactly orthogonal, which is what lets
several users share the same chip stream without interfering after
despreading.  Users get disjoint contiguous blocks of rows, so every user
detects only against its own subset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError

__all__ = [
    "WalshCodebook",
    "CodeGrouping",
    "generate_hadamard",
    "group_codebook",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class WalshCodebook:
    """Square +1/-1 code matrix; row ``n`` is the n-th spreading code."""

    length: int
    matrix: np.ndarray  # shape (length, length), dtype int64, entries +1/-1

    def row(self, n: int) -> np.ndarray:
        if not 0 <= n < self.length:
            raise ValueError(f"row index {n} outside 0..{self.length - 1}")
        return self.matrix[n]


@dataclass(frozen=True)
class CodeGrouping:
    """Disjoint assignment of codebook rows to users.

    ``assignment[k]`` holds the row indices owned by user ``k+1`` (users are
    labelled 1-based), in increasing order.
    """

    num_users: int
    codes_per_user: int
    assignment: tuple[tuple[int, ...], ...]

    def rows_for_user(self, user: int) -> tuple[int, ...]:
        """Row indices for 1-based user label ``user``."""
        if not 1 <= user <= self.num_users:
            raise ValueError(f"user label {user} outside 1..{self.num_users}")
        return self.assignment[user - 1]


def generate_hadamard(length: int) -> WalshCodebook:
    """Build the Sylvester Hadamard codebook of the given power-of-2 size.

    Entries are signed integers so orthogonality checks are exact:
    dot(row_i, row_k) == length for i == k and 0 otherwise.
    """
    if not isinstance(length, (int, np.integer)) or isinstance(length, bool):
        raise ValueError(f"code length must be an integer, got {length!r}")
    if length < 2 or not _is_power_of_two(int(length)):
        raise ValueError(f"code length must be a power of 2, at least 2, got {length}")
    length = int(length)
    h = np.array([[1]], dtype=np.int64)
    while h.shape[0] < length:
        h = np.block([[h, h], [h, -h]])
    return WalshCodebook(length=length, matrix=h)


def group_codebook(codebook: WalshCodebook, num_users: int, codes_per_user: int) -> CodeGrouping:
    """Partition the codebook into disjoint contiguous per-user blocks.

    User k (1-based) owns rows (k-1)*codes_per_user .. k*codes_per_user - 1.
    Rows beyond num_users*codes_per_user stay unassigned.
    """
    if not isinstance(num_users, (int, np.integer)) or num_users < 1:
        raise ValueError(f"num_users must be a positive integer, got {num_users!r}")
    if not isinstance(codes_per_user, (int, np.integer)) or codes_per_user < 1:
        raise ValueError(f"codes_per_user must be a positive integer, got {codes_per_user!r}")
    if not _is_power_of_two(int(codes_per_user)):
        raise ValueError(f"codes_per_user must be a power of 2, got {codes_per_user}")
    num_users = int(num_users)
    codes_per_user = int(codes_per_user)
    if num_users * codes_per_user > codebook.length:
        raise CapacityError(
            f"cannot assign {num_users} users x {codes_per_user} codes: "
            f"{num_users * codes_per_user} rows needed but the codebook has "
            f"only {codebook.length}"
        )
    assignment = tuple(
        tuple(range(k * codes_per_user, (k + 1) * codes_per_user))
        for k in range(num_users)
    )
    return CodeGrouping(
        num_users=num_users,
        codes_per_user=codes_per_user,
        assignment=assignment,
    )
