"""Reproducible BER-vs-SNR Monte Carlo sweeps.

Work is partitioned into fixed-size blocks of symbols per SNR point.  Block
``j`` of point ``p`` draws everything it needs from an RNG stream derived
from (master_seed, p, j), and blocks are always accumulated in block order,
so the result is a pure function of the sweep spec: worker count, scheduling
and speculative execution never change a single byte of the output.  All
accumulation is integer (bit and error counters), which keeps the reduction
exact.

Each point stops after the first block at which every user has collected
``min_bit_errors`` bit errors, or once ``max_symbols`` symbols are spent,
whichever comes first.  Fading is block fading: one channel draw per
transmitted symbol.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .analysis import (
    BoundParams,
    eb_db_from_chip_snr_db,
    rates,
    upper_bound_ber,
)
from .channel import SystemConfig
from .codebook import generate_hadamard, group_codebook
from .errors import GridAlignmentError

__all__ = [
    "SweepSpec",
    "PointResult",
    "BerSweepResult",
    "run_sweep",
    "CurvePoint",
    "OrderingClaim",
    "ComparisonTable",
    "compare_configs",
    "CSV_COLUMNS",
]

CSV_COLUMNS = (
    "ue", "snr_db", "ber_sim", "ber_bound",
    "ber_private", "ber_common", "bits", "errors", "flag",
)


@dataclass(frozen=True)
class SweepSpec:
    """Everything that determines a sweep's output, including the seed."""

    config: SystemConfig
    snr_grid_db: tuple[float, ...]
    min_bit_errors: int = 100
    max_symbols: int = 10_000_000
    master_seed: int = 0
    block_symbols: int = 8192

    def __post_init__(self) -> None:
        grid = tuple(float(v) for v in self.snr_grid_db)
        object.__setattr__(self, "snr_grid_db", grid)
        if len(grid) == 0:
            raise ValueError("snr_grid_db must not be empty")
        if any(lo >= hi for lo, hi in zip(grid, grid[1:])):
            raise ValueError(f"snr_grid_db must be strictly increasing, got {grid}")
        if self.min_bit_errors < 1:
            raise ValueError(f"min_bit_errors must be >= 1, got {self.min_bit_errors}")
        if self.max_symbols < 1:
            raise ValueError(f"max_symbols must be >= 1, got {self.max_symbols}")
        if self.block_symbols < 1:
            raise ValueError(f"block_symbols must be >= 1, got {self.block_symbols}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError(f"master_seed must fit in 64 bits, got {self.master_seed}")

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "config": {
                "num_tx_antennas": cfg.num_tx_antennas,
                "num_users": cfg.num_users,
                "code_length": cfg.code_length,
                "codes_per_user": cfg.codes_per_user,
                "fading_variances": list(cfg.fading_variances),
                "traffic_mode": cfg.traffic_mode,
            },
            "snr_grid_db": list(self.snr_grid_db),
            "min_bit_errors": self.min_bit_errors,
            "max_symbols": self.max_symbols,
            "master_seed": self.master_seed,
            "block_symbols": self.block_symbols,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("ascii")).hexdigest()


@dataclass(frozen=True)
class PointResult:
    """Counters and rates for one user at one SNR point."""

    ue: int
    snr_db: float
    ber_sim: float
    ber_bound: float
    ber_private: float
    ber_common: float
    bits: int
    errors: int
    private_bits: int
    private_errors: int
    common_bits: int
    common_errors: int
    flag: str


@dataclass(frozen=True)
class BerSweepResult:
    """All points of one sweep plus reproducibility metadata."""

    spec: SweepSpec
    rows: tuple[PointResult, ...]
    config_hash: str
    wall_time_s: float

    @property
    def master_seed(self) -> int:
        return self.spec.master_seed

    def to_csv_text(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for r in self.rows:
            lines.append(
                f"{r.ue},{r.snr_db:g},{r.ber_sim:.10e},{r.ber_bound:.10e},"
                f"{r.ber_private:.10e},{r.ber_common:.10e},"
                f"{r.bits},{r.errors},{r.flag}"
            )
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_text())

    def sidecar_dict(self) -> dict:
        d = self.spec.to_dict()
        d["config_hash"] = self.config_hash
        return d

    def write_sidecar(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(json.dumps(self.sidecar_dict(), sort_keys=True, indent=2) + "\n")


def _popcount_table(n_codes: int) -> np.ndarray:
    return np.array([bin(v).count("1") for v in range(n_codes)], dtype=np.int64)


def _user_codes(config: SystemConfig) -> np.ndarray:
    """Stacked per-user code subsets, shape (num_users, codes_per_user, L)."""
    book = generate_hadamard(config.code_length)
    grouping = group_codebook(book, config.num_users, config.codes_per_user)
    rows = np.array(grouping.assignment, dtype=np.intp)
    return book.matrix[rows].astype(np.float64)


def _draw_block(
    config: SystemConfig,
    rng: np.random.Generator,
    count: int,
    with_noise: bool,
) -> dict:
    """Draw every random quantity for ``count`` symbols, in a fixed order."""
    n_u, n_c = config.num_users, config.codes_per_user
    n_t, l_c = config.num_tx_antennas, config.code_length
    out: dict = {}
    out["n_i"] = rng.integers(0, n_c, size=(count, n_u))
    out["n_q"] = rng.integers(0, n_c, size=(count, n_u))
    if config.traffic_mode == "broadcast":
        out["l_i"] = np.broadcast_to(rng.integers(0, 2, size=(count, 1)), (count, n_u))
        out["l_q"] = np.broadcast_to(rng.integers(0, 2, size=(count, 1)), (count, n_u))
    else:
        out["l_i"] = rng.integers(0, 2, size=(count, n_u))
        out["l_q"] = rng.integers(0, 2, size=(count, n_u))
    scale = np.sqrt(np.asarray(config.fading_variances) / 2.0)[None, :, None]
    out["h"] = (
        rng.standard_normal((count, n_u, n_t))
        + 1j * rng.standard_normal((count, n_u, n_t))
    ) * scale
    if with_noise:
        out["noise"] = (
            rng.standard_normal((count, n_u, l_c))
            + 1j * rng.standard_normal((count, n_u, l_c))
        )
    return out


def _evaluate_block(
    config: SystemConfig,
    subcodes: np.ndarray,
    pop_table: np.ndarray,
    draws: dict,
    noise_density: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Transmit, propagate and detect one block; count per-user bit errors.

    Returns (private_errors, common_errors), each shape (num_users,).
    The math mirrors the single-symbol operations in ``modem`` and
    ``channel`` exactly (see the equivalence tests): beamformed
    superposition, per-user reception, despreading against the user's own
    code subset, and largest-magnitude-with-sign detection per rail.
    """
    n_u = config.num_users
    l_c = config.code_length
    amp = 1.0 / np.sqrt(2.0)
    n_i, n_q = draws["n_i"], draws["n_q"]
    l_i, l_q = draws["l_i"], draws["l_q"]
    h = draws["h"]

    s_i = (1.0 - 2.0 * l_i) * amp
    s_q = (1.0 - 2.0 * l_q) * amp
    users = np.arange(n_u)[None, :]
    g = subcodes[users, n_i] * s_i[..., None] + 1j * (subcodes[users, n_q] * s_q[..., None])

    norm2 = np.einsum("bkt,bkt->bk", h.real, h.real) + np.einsum("bkt,bkt->bk", h.imag, h.imag)
    sigma2 = np.asarray(config.fading_variances)[None, :]
    beta = np.sqrt(config.power_coeff * norm2 / sigma2)
    w = (beta / norm2)[..., None] * h

    x = np.einsum("bkt,bkc->btc", w, g)
    y = np.einsum("bkt,btc->bkc", h.conj(), x)
    if noise_density > 0.0:
        y = y + draws["noise"] * np.sqrt(noise_density / 2.0)

    r_i = np.einsum("bkc,knc->bkn", np.ascontiguousarray(y.real), subcodes)
    r_q = np.einsum("bkc,knc->bkn", np.ascontiguousarray(y.imag), subcodes)

    def detect(rail: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        hat = np.argmax(np.abs(rail), axis=2)
        peak = np.take_along_axis(rail, hat[..., None], axis=2)[..., 0]
        return hat, (peak < 0.0).astype(np.int64)

    hat_i, lhat_i = detect(r_i)
    hat_q, lhat_q = detect(r_q)

    private = pop_table[n_i ^ hat_i] + pop_table[n_q ^ hat_q]
    common = (l_i != lhat_i).astype(np.int64) + (l_q != lhat_q).astype(np.int64)
    return private.sum(axis=0), common.sum(axis=0)


def _block_counts(
    spec: SweepSpec, point_idx: int, block_idx: int, count: int
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate one block on its own derived random stream."""
    seed = np.random.SeedSequence(spec.master_seed, spawn_key=(point_idx, block_idx))
    rng = np.random.default_rng(seed)
    noise_density = 10.0 ** (-spec.snr_grid_db[point_idx] / 10.0)
    config = spec.config
    draws = _draw_block(config, rng, count, with_noise=noise_density > 0.0)
    subcodes = _user_codes(config)
    pop = _popcount_table(config.codes_per_user)
    return _evaluate_block(config, subcodes, pop, draws, noise_density)


def _run_point(
    spec: SweepSpec,
    point_idx: int,
    pool: ProcessPoolExecutor | None,
    window: int,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Accumulate blocks in block order until the stop rule fires."""
    n_u = spec.config.num_users
    private = np.zeros(n_u, dtype=np.int64)
    common = np.zeros(n_u, dtype=np.int64)
    symbols = 0
    next_submit = 0
    pending: deque = deque()

    def block_count(j: int) -> int:
        start = j * spec.block_symbols
        return max(0, min(spec.block_symbols, spec.max_symbols - start))

    while True:
        if pool is not None:
            while len(pending) < window and block_count(next_submit) > 0:
                c = block_count(next_submit)
                pending.append(
                    (pool.submit(_block_counts, spec, point_idx, next_submit, c), c)
                )
                next_submit += 1
            if not pending:
                break
            fut, count = pending.popleft()
            p_err, c_err = fut.result()
        else:
            count = block_count(next_submit)
            if count == 0:
                break
            p_err, c_err = _block_counts(spec, point_idx, next_submit, count)
            next_submit += 1
        private += p_err
        common += c_err
        symbols += count
        if np.all(private + common >= spec.min_bit_errors) or symbols >= spec.max_symbols:
            break
    for fut, _ in pending:
        fut.cancel()
    return private, common, symbols


def run_sweep(spec: SweepSpec, workers: int = 1) -> BerSweepResult:
    """Run the full sweep; the result is a pure function of ``spec``.

    ``workers`` only sets how many processes compute blocks; any value
    yields bit-identical results.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    t0 = time.perf_counter()
    config = spec.config
    m = config.index_bits
    rows: list[PointResult] = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for point_idx, snr_db in enumerate(spec.snr_grid_db):
            private, common, symbols = _run_point(spec, point_idx, pool, window=2 * workers)
            bound = upper_bound_ber(BoundParams(
                num_tx_antennas=config.num_tx_antennas,
                codes_per_user=config.codes_per_user,
                code_length=config.code_length,
                power_coeff=config.power_coeff,
                chip_snr=10.0 ** (snr_db / 10.0),
            ))
            private_bits = symbols * 2 * m
            common_bits = symbols * 2
            for k in range(config.num_users):
                errors = int(private[k] + common[k])
                bits = private_bits + common_bits
                if errors == 0:
                    flag = "zero_errors"
                elif errors < spec.min_bit_errors:
                    flag = "low_errors"
                else:
                    flag = "ok"
                rows.append(PointResult(
                    ue=k + 1,
                    snr_db=snr_db,
                    ber_sim=errors / bits,
                    ber_bound=bound,
                    ber_private=int(private[k]) / private_bits,
                    ber_common=int(common[k]) / common_bits,
                    bits=bits,
                    errors=errors,
                    private_bits=private_bits,
                    private_errors=int(private[k]),
                    common_bits=common_bits,
                    common_errors=int(common[k]),
                    flag=flag,
                ))
    finally:
        if pool is not None:
            pool.shutdown(wait=False, cancel_futures=True)
    rows.sort(key=lambda r: (r.ue, r.snr_db))
    return BerSweepResult(
        spec=spec,
        rows=tuple(rows),
        config_hash=spec.config_hash(),
        wall_time_s=time.perf_counter() - t0,
    )


@dataclass(frozen=True)
class CurvePoint:
    """One aligned overlay row of a multi-configuration comparison."""

    label: str
    ue: int
    snr_db: float
    eb_db: float
    ber_sim: float
    ber_bound: float
    bits: int
    errors: int
    flag: str


@dataclass(frozen=True)
class OrderingClaim:
    """A computed better/worse relation between two swept configurations."""

    kind: str            # "more_antennas" | "fewer_users" | "more_codes_equal_eb"
    better_label: str
    worse_label: str
    holds: bool | None   # None when no points were comparable
    points_compared: int


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[CurvePoint, ...]
    claims: tuple[OrderingClaim, ...]
    results: tuple[BerSweepResult, ...] = field(repr=False, default=())

    def to_csv_text(self) -> str:
        header = "label,ue,snr_db,eb_db,ber_sim,ber_bound,bits,errors,flag"
        lines = [header]
        for r in self.rows:
            lines.append(
                f"{r.label},{r.ue},{r.snr_db:g},{r.eb_db:.6f},"
                f"{r.ber_sim:.10e},{r.ber_bound:.10e},{r.bits},{r.errors},{r.flag}"
            )
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_text())

    def claim(self, kind: str) -> OrderingClaim:
        for c in self.claims:
            if c.kind == kind:
                return c
        raise KeyError(f"no ordering claim of kind {kind!r} in this comparison")


def _bs_rate(config: SystemConfig) -> int:
    _, (broadcast, unicast) = rates(config.index_bits, config.num_users)
    return broadcast if config.traffic_mode == "broadcast" else unicast


def _label(i: int, config: SystemConfig) -> str:
    return (
        f"c{i}.lc{config.code_length}nt{config.num_tx_antennas}"
        f"nu{config.num_users}nc{config.codes_per_user}.{config.traffic_mode}"
    )


def _aggregate(result: BerSweepResult) -> dict[float, tuple[int, int]]:
    """Per point: (total bits, total errors) summed over users."""
    out: dict[float, tuple[int, int]] = {}
    for r in result.rows:
        bits, errors = out.get(r.snr_db, (0, 0))
        out[r.snr_db] = (bits + r.bits, errors + r.errors)
    return out


def _flat_variances(config: SystemConfig) -> float | None:
    vs = set(config.fading_variances)
    return vs.pop() if len(vs) == 1 else None


def _interp_log_ber(
    eb_grid: Sequence[float], ber: Sequence[float], eligible: Sequence[bool], x: float
) -> float | None:
    """Linear-in-dB interpolation of log10(BER); None outside eligible spans."""
    for a in range(len(eb_grid) - 1):
        b = a + 1
        if eb_grid[a] - 1e-9 <= x <= eb_grid[b] + 1e-9:
            if not (eligible[a] and eligible[b]) or ber[a] <= 0 or ber[b] <= 0:
                return None
            t = (x - eb_grid[a]) / (eb_grid[b] - eb_grid[a])
            return 10.0 ** ((1 - t) * math.log10(ber[a]) + t * math.log10(ber[b]))
    return None


def compare_configs(
    specs: Sequence[SweepSpec],
    workers: int = 1,
    min_errors_for_claims: int = 100,
) -> ComparisonTable:
    """Sweep several configurations on one SNR grid and compare them.

    All specs must share an identical chip-SNR grid.  For every pair of
    configurations that differ in exactly one of the antenna count, the
    user count (with flat equal variances) or the codes-per-user count,
    the table carries a computed ordering claim over the points at which
    both curves collected at least ``min_errors_for_claims`` errors:

    - more_antennas: more transmit antennas gives equal-or-lower BER at
      every eligible shared chip-SNR point;
    - fewer_users: fewer users (more power each) gives equal-or-lower BER
      at every eligible shared chip-SNR point;
    - more_codes_equal_eb: more codes per user gives equal-or-lower BER at
      equal information-bit SNR.  A larger code subset carries more bits
      per chip, so equal chip SNR means a higher bit energy for the
      smaller subset; the claim is therefore evaluated on the Eb/N0 axis,
      interpolating the smaller-subset curve (log-BER, linear in dB) onto
      the larger-subset curve's Eb points.
    """
    specs = list(specs)
    if len(specs) < 2:
        raise ValueError(f"need at least 2 sweep specs, got {len(specs)}")
    grid = specs[0].snr_grid_db
    for s in specs[1:]:
        if s.snr_grid_db != grid:
            raise GridAlignmentError(
                f"SNR grids differ: {s.snr_grid_db} vs {grid}; "
                "sweeps must share one chip-SNR grid"
            )
    results = [run_sweep(s, workers=workers) for s in specs]
    labels = [_label(i, s.config) for i, s in enumerate(specs)]

    rows: list[CurvePoint] = []
    for label, res in zip(labels, results):
        bs = _bs_rate(res.spec.config)
        for r in res.rows:
            rows.append(CurvePoint(
                label=label,
                ue=r.ue,
                snr_db=r.snr_db,
                eb_db=eb_db_from_chip_snr_db(r.snr_db, bs, res.spec.config.code_length),
                ber_sim=r.ber_sim,
                ber_bound=r.ber_bound,
                bits=r.bits,
                errors=r.errors,
                flag=r.flag,
            ))

    claims: list[OrderingClaim] = []
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            claims.extend(_pair_claims(
                specs[i].config, specs[j].config,
                labels[i], labels[j],
                results[i], results[j],
                grid, min_errors_for_claims,
            ))
    return ComparisonTable(rows=tuple(rows), claims=tuple(claims), results=tuple(results))


def _pair_claims(
    cfg_a: SystemConfig,
    cfg_b: SystemConfig,
    label_a: str,
    label_b: str,
    res_a: BerSweepResult,
    res_b: BerSweepResult,
    grid: tuple[float, ...],
    min_errors: int,
) -> list[OrderingClaim]:
    agg_a = _aggregate(res_a)
    agg_b = _aggregate(res_b)

    def shared_point_claim(kind: str, better, worse, agg_better, agg_worse) -> OrderingClaim:
        holds = True
        n = 0
        for snr in grid:
            bits_b, err_b = agg_better[snr]
            bits_w, err_w = agg_worse[snr]
            if err_b < min_errors or err_w < min_errors:
                continue
            n += 1
            if err_b / bits_b > err_w / bits_w:
                holds = False
        return OrderingClaim(kind, better, worse, holds if n else None, n)

    same = {
        "lc": cfg_a.code_length == cfg_b.code_length,
        "nt": cfg_a.num_tx_antennas == cfg_b.num_tx_antennas,
        "nu": cfg_a.num_users == cfg_b.num_users,
        "nc": cfg_a.codes_per_user == cfg_b.codes_per_user,
        "var": cfg_a.fading_variances == cfg_b.fading_variances,
        "mode": cfg_a.traffic_mode == cfg_b.traffic_mode,
    }

    claims: list[OrderingClaim] = []
    if same["lc"] and same["nu"] and same["nc"] and same["var"] and same["mode"] and not same["nt"]:
        if cfg_a.num_tx_antennas > cfg_b.num_tx_antennas:
            claims.append(shared_point_claim("more_antennas", label_a, label_b, agg_a, agg_b))
        else:
            claims.append(shared_point_claim("more_antennas", label_b, label_a, agg_b, agg_a))
    if same["lc"] and same["nt"] and same["nc"] and same["mode"] and not same["nu"]:
        va, vb = _flat_variances(cfg_a), _flat_variances(cfg_b)
        if va is not None and va == vb:
            if cfg_a.num_users < cfg_b.num_users:
                claims.append(shared_point_claim("fewer_users", label_a, label_b, agg_a, agg_b))
            else:
                claims.append(shared_point_claim("fewer_users", label_b, label_a, agg_b, agg_a))
    if same["lc"] and same["nt"] and same["nu"] and same["var"] and same["mode"] and not same["nc"]:
        if cfg_a.codes_per_user > cfg_b.codes_per_user:
            claims.append(_equal_eb_claim(cfg_a, cfg_b, label_a, label_b,
                                          agg_a, agg_b, grid, min_errors))
        else:
            claims.append(_equal_eb_claim(cfg_b, cfg_a, label_b, label_a,
                                          agg_b, agg_a, grid, min_errors))
    return claims


def _equal_eb_claim(
    cfg_hi: SystemConfig,
    cfg_lo: SystemConfig,
    label_hi: str,
    label_lo: str,
    agg_hi: dict,
    agg_lo: dict,
    grid: tuple[float, ...],
    min_errors: int,
) -> OrderingClaim:
    """more_codes_equal_eb: larger code subset wins at equal Eb/N0."""
    bs_hi, bs_lo = _bs_rate(cfg_hi), _bs_rate(cfg_lo)
    eb_hi = [eb_db_from_chip_snr_db(s, bs_hi, cfg_hi.code_length) for s in grid]
    eb_lo = [eb_db_from_chip_snr_db(s, bs_lo, cfg_lo.code_length) for s in grid]
    ber_lo = [agg_lo[s][1] / agg_lo[s][0] for s in grid]
    ok_lo = [agg_lo[s][1] >= min_errors for s in grid]
    holds = True
    n = 0
    for snr, eb in zip(grid, eb_hi):
        bits, errors = agg_hi[snr]
        if errors < min_errors:
            continue
        ref = _interp_log_ber(eb_lo, ber_lo, ok_lo, eb)
        if ref is None:
            continue
        n += 1
        if errors / bits > ref:
            holds = False
    return OrderingClaim("more_codes_equal_eb", label_hi, label_lo, holds if n else None, n)
