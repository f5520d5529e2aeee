"""Acceptance suite: nine behavioral guarantees, one verdict line each.

Every test computes its outcome first, prints a single [PASS]/[FAIL] line
with the measured numbers, then asserts.  Heavy Monte Carlo fixtures use
pinned seeds so the whole suite is reproducible run to run.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from grcim import (
    BoundParams,
    SweepSpec,
    SystemConfig,
    apply_channel,
    bits_to_symbol,
    compare_configs,
    correlate,
    draw_channel,
    generate_hadamard,
    group_codebook,
    max_users,
    ml_detect,
    modulate,
    rates,
    run_sweep,
    spectrum_utilization,
    upper_bound_ber,
    zf_precode,
)
from oracles import bound_mc, interp_crossing_db, two_proportion_z


def _emit(capsys, ok: bool, label: str) -> None:
    with capsys.disabled():
        print(("\n[PASS] " if ok else "\n[FAIL] ") + label)


def _flat_config(num_tx, num_users, code_length, codes_per_user, mode="broadcast"):
    return SystemConfig(
        num_tx_antennas=num_tx,
        num_users=num_users,
        code_length=code_length,
        codes_per_user=codes_per_user,
        fading_variances=(1.0,) * num_users,
        traffic_mode=mode,
    )


def test_01_codebook_orthogonality_is_exact(capsys):
    t0 = time.perf_counter()
    exact = True
    for length in (2, 4, 8, 16, 32):
        matrix = generate_hadamard(length).matrix
        gram = matrix @ matrix.T
        exact &= np.issubdtype(gram.dtype, np.integer)
        exact &= np.array_equal(gram, length * np.eye(length, dtype=np.int64))
    elapsed = time.perf_counter() - t0
    ok = exact and elapsed < 1.0
    _emit(capsys, ok, f"1 codebook orthogonality: integer Gram = Lc*I for "
                      f"Lc in 2..32, {elapsed:.3f}s (< 1s)")
    assert ok


def test_02_noiseless_loopback_all_words_all_geometries(capsys):
    t0 = time.perf_counter()
    rng_idle = np.random.default_rng(0)
    cases = 0
    failures = 0
    combos = 0
    for code_length in (2, 4, 8, 16):
        codes_per_user = 2
        while codes_per_user <= code_length:
            for num_users in range(1, code_length // codes_per_user + 1):
                combos += 1
                cfg = _flat_config(2, num_users, code_length, codes_per_user)
                book = generate_hadamard(code_length)
                grouping = group_codebook(book, num_users, codes_per_user)
                m = cfg.index_bits
                width = cfg.bits_per_symbol
                n_words = 1 << width
                seed = 1_000_000 + code_length * 1000 + codes_per_user * 10 + num_users
                realization = draw_channel(cfg, np.random.default_rng(seed))
                rows = [grouping.rows_for_user(k + 1) for k in range(num_users)]
                for w in range(n_words):
                    sent = []
                    chips = np.empty((num_users, code_length), dtype=complex)
                    for k in range(num_users):
                        v = (w + k) % n_words
                        bits = [(v >> (width - 1 - j)) & 1 for j in range(width)]
                        sym = bits_to_symbol(bits, m)
                        sent.append(sym)
                        chips[k] = modulate(sym, rows[k], book)
                    received = apply_channel(
                        zf_precode(realization, chips), realization, 0.0, rng_idle
                    )
                    for k in range(num_users):
                        bank = correlate(received.signals[k], rows[k], book)
                        got = ml_detect(
                            bank, float(realization.power_factors[k]), code_length
                        )
                        cases += 1
                        failures += got != sent[k]
            codes_per_user *= 2
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 10.0
    _emit(capsys, ok, f"2 noiseless loopback: {failures} errors over {cases} "
                      f"word/user cases in {combos} geometries, "
                      f"{elapsed:.2f}s (< 10s)")
    assert ok


def test_03_power_normalization_and_beamforming_identity(capsys):
    t0 = time.perf_counter()
    cfg = SystemConfig(
        num_tx_antennas=4,
        num_users=3,
        code_length=8,
        codes_per_user=2,
        fading_variances=(0.5, 1.0, 2.0),
    )
    rng = np.random.default_rng(77)
    worst_power = 0.0
    worst_gain = 0.0
    for _ in range(10_000):
        realization = draw_channel(cfg, rng)
        norm2 = np.sum(np.abs(realization.h) ** 2, axis=1)
        w = (realization.power_factors / norm2)[:, None] * realization.h
        worst_power = max(worst_power, abs(np.sum(np.abs(w) ** 2) - 1.0))
        gains = np.einsum("kt,kt->k", realization.h.conj(), w)
        worst_gain = max(worst_gain, np.max(np.abs(gains - realization.power_factors)))
    elapsed = time.perf_counter() - t0
    ok = worst_power < 1e-12 and worst_gain < 1e-10 and elapsed < 5.0
    _emit(capsys, ok, f"3 power/beamforming identities over 1e4 draws: "
                      f"max|sum P_k - 1|={worst_power:.1e} (< 1e-12), "
                      f"max|h^H w - beta|={worst_gain:.1e} (< 1e-10), "
                      f"{elapsed:.2f}s (< 5s)")
    assert ok


def test_04_closed_form_bound_matches_monte_carlo_oracle(capsys):
    t0 = time.perf_counter()
    worst = 0.0
    worst_at = None
    seed = 9000
    for num_tx in (2, 4):
        for code_length in (8, 16):
            for codes_per_user in (2, 4):
                for snr_db in (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0):
                    seed += 1
                    chip_snr = 10.0 ** (snr_db / 10.0)
                    closed = upper_bound_ber(BoundParams(
                        num_tx_antennas=num_tx,
                        codes_per_user=codes_per_user,
                        code_length=code_length,
                        power_coeff=0.5,
                        chip_snr=chip_snr,
                    ))
                    estimate = bound_mc(
                        num_tx, codes_per_user, code_length, 0.5, chip_snr,
                        draws=1_000_000, seed=seed,
                    )
                    rel = abs(closed - estimate) / closed
                    if rel > worst:
                        worst = rel
                        worst_at = (num_tx, code_length, codes_per_user, snr_db)
    elapsed = time.perf_counter() - t0
    ok = worst < 0.01
    _emit(capsys, ok, f"4 closed-form bound vs 1e6-draw Monte Carlo on 56 "
                      f"points: worst rel err {worst:.2e} (< 1e-2) at "
                      f"nt,lc,nc,dB={worst_at}, {elapsed:.0f}s")
    assert ok


FIGURE_GRIDS = {
    4: tuple(float(v) for v in range(2, 11)),
    2: tuple(float(v) for v in range(14, 22)),
}
GAP_LIMITS_DB = {4: 0.5, 2: 2.0}


def test_05_simulation_under_bound_with_tight_crossing_gap(capsys):
    t0 = time.perf_counter()
    ok = True
    details = []
    for num_tx in (4, 2):
        for codes_per_user in (2, 4):
            spec = SweepSpec(
                config=_flat_config(num_tx, 2, 8, codes_per_user),
                snr_grid_db=FIGURE_GRIDS[num_tx],
                min_bit_errors=400,
                master_seed=0,
            )
            result = run_sweep(spec)
            eligible = [r for r in result.rows if r.errors >= 100]
            under = all(r.ber_sim <= r.ber_bound for r in eligible)
            pooled = {}
            bound_at = {}
            for r in result.rows:
                bits, errors = pooled.get(r.snr_db, (0, 0))
                pooled[r.snr_db] = (bits + r.bits, errors + r.errors)
                bound_at[r.snr_db] = r.ber_bound
            grid = np.array(sorted(pooled))
            sim_ber = np.array([pooled[s][1] / pooled[s][0] for s in grid])
            bound_ber = np.array([bound_at[s] for s in grid])
            cross_sim = interp_crossing_db(grid, sim_ber, 1e-4)
            cross_bound = interp_crossing_db(grid, bound_ber, 1e-4)
            gap = cross_bound - cross_sim
            limit = GAP_LIMITS_DB[num_tx]
            curve_ok = bool(under and len(eligible) > 0 and gap < limit)
            ok &= curve_ok
            details.append(
                f"nt{num_tx}nc{codes_per_user}: under-bound={under} "
                f"({len(eligible)} pts), gap@1e-4={gap:+.2f}dB (< {limit})"
            )
    elapsed = time.perf_counter() - t0
    _emit(capsys, ok, "5 figure-scale reproduction: "
                      + "; ".join(details) + f", {elapsed:.0f}s")
    assert ok, details


def test_06_ordering_claims_hold(capsys):
    t0 = time.perf_counter()

    nt_specs = [
        SweepSpec(config=_flat_config(nt, 2, 8, 2), snr_grid_db=(4.0, 6.0, 8.0),
                  min_bit_errors=300, max_symbols=4_000_000, master_seed=21)
        for nt in (2, 4)
    ]
    more_antennas = compare_configs(nt_specs).claim("more_antennas")

    nc_specs = [
        SweepSpec(config=_flat_config(2, 2, 8, nc),
                  snr_grid_db=(0.0, 2.0, 4.0, 6.0, 8.0),
                  min_bit_errors=300, max_symbols=4_000_000, master_seed=5)
        for nc in (2, 4)
    ]
    more_codes = compare_configs(nc_specs).claim("more_codes_equal_eb")

    nu_specs = [
        SweepSpec(config=_flat_config(2, nu, 8, 2), snr_grid_db=(2.0, 4.0, 6.0),
                  min_bit_errors=300, max_symbols=2_000_000, master_seed=13)
        for nu in (2, 4)
    ]
    fewer_users = compare_configs(nu_specs).claim("fewer_users")

    elapsed = time.perf_counter() - t0
    checks = [
        ("nt4>nt2", more_antennas, 2),
        ("nc4>nc2@eb", more_codes, 2),
        ("nu2>nu4", fewer_users, 2),
    ]
    ok = all(c.holds is True and c.points_compared >= n for _, c, n in checks)
    detail = "; ".join(
        f"{name}: holds={c.holds} ({c.points_compared} pts)" for name, c, n in checks
    )
    _emit(capsys, ok, f"6 ordering claims: {detail}, {elapsed:.0f}s")
    assert ok, detail


def test_07_fairness_across_fading_variances(capsys):
    t0 = time.perf_counter()
    cfg = SystemConfig(
        num_tx_antennas=4,
        num_users=2,
        code_length=8,
        codes_per_user=2,
        fading_variances=(1.0, 4.0),
    )
    spec = SweepSpec(config=cfg, snr_grid_db=(4.0,), min_bit_errors=1000,
                     master_seed=31)
    rows = run_sweep(spec).rows
    r1, r2 = rows
    z = two_proportion_z(r1.errors, r1.bits, r2.errors, r2.bits)
    direct = upper_bound_ber(BoundParams(
        num_tx_antennas=4, codes_per_user=2, code_length=8,
        power_coeff=cfg.power_coeff, chip_snr=10.0 ** 0.4,
    ))
    bounds_equal = r1.ber_bound == r2.ber_bound == direct
    enough = r1.errors >= 1000 and r2.errors >= 1000
    elapsed = time.perf_counter() - t0
    ok = bool(enough and abs(z) < 2.576 and bounds_equal)
    _emit(capsys, ok, f"7 fairness with variances (1,4): per-user errors "
                      f"{r1.errors}/{r2.errors}, |z|={abs(z):.2f} (< 2.576 at "
                      f"1%), equal bounds={bounds_equal}, {elapsed:.0f}s")
    assert ok


def test_08_comparison_metrics_are_exact(capsys):
    checks = []
    per_user, (lo, hi) = rates(index_bits=2, num_users=2)
    checks.append(per_user == 6)
    checks.append((lo, hi) == (10, 12))
    checks.append(rates(1, 4) == (4, (10, 16)))
    checks.append(max_users(8, 1, 4) == (8, 4))
    checks.append(max_users(16, 1, 2) == (16, 2))
    checks.append(max_users(16, 4, 4) == (4, 4))
    util = spectrum_utilization(
        index_bits=2, num_users=1, code_length=8, bs_rate=6,
        sdma_private_bits=[4], sdma_common_bits=[2],
    )
    checks.append(util.ue_grcim == Fraction(3, 4))
    checks.append(isinstance(util.bs_grcim, Fraction))
    checks.append(util.bs_sdma == 6)
    ok = all(checks)
    _emit(capsys, ok, f"8 comparison metrics: {sum(checks)}/{len(checks)} "
                      f"exact integer/rational identities (rate 6 bpcu at "
                      f"m=2, single-code capacity = Lc)")
    assert ok, checks


def test_09_determinism_across_worker_counts(capsys):
    t0 = time.perf_counter()
    spec = SweepSpec(
        config=_flat_config(2, 2, 8, 2),
        snr_grid_db=(0.0, 2.0, 4.0),
        min_bit_errors=200,
        master_seed=11,
    )
    texts = [run_sweep(spec, workers=w).to_csv_text() for w in (1, 2, 3)]
    repeat = run_sweep(spec, workers=2).to_csv_text()
    elapsed = time.perf_counter() - t0
    ok = texts[0] == texts[1] == texts[2] == repeat
    _emit(capsys, ok, f"9 determinism: byte-identical CSVs for worker counts "
                      f"1/2/3 and a repeat run, {elapsed:.0f}s")
    assert ok
