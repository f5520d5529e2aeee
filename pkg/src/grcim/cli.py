"""Command line front end.

Three subcommands:

- ``codebook``: print or save the grouped spreading codebook as JSON.
- ``analyze``: evaluate the closed-form BER upper bound on an SNR grid.
- ``simulate``: run a reproducible Monte Carlo BER sweep, writing the
  results CSV plus a JSON sidecar that records the full sweep spec, the
  master seed and the configuration hash.

SNR grids are given either as ``start:stop:step`` (inclusive of ``stop``
when it lands on the grid) or as a comma-separated list of dB values.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .analysis import BoundParams, upper_bound_ber
from .channel import SystemConfig
from .codebook import generate_hadamard, group_codebook
from .engine import SweepSpec, run_sweep

__all__ = ["main", "build_parser"]


def _parse_snr_grid(text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(
                f"expected start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad SNR grid {text!r}: {exc}") from exc
        if step <= 0:
            raise argparse.ArgumentTypeError(f"step must be positive in {text!r}")
        grid = []
        k = 0
        while True:
            v = start + k * step
            if v > stop + 1e-9:
                break
            grid.append(round(v, 9))
            k += 1
        if not grid:
            raise argparse.ArgumentTypeError(f"empty SNR grid from {text!r}")
        return tuple(grid)
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad SNR grid {text!r}: {exc}") from exc


def _parse_sigmas(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad variance list {text!r}: {exc}") from exc


def _variances(sigmas: tuple[float, ...], num_users: int) -> tuple[float, ...]:
    if len(sigmas) == 1:
        return sigmas * num_users
    if len(sigmas) != num_users:
        raise SystemExit(
            f"error: got {len(sigmas)} fading variances for {num_users} users")
    return sigmas


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grcim",
        description="Grouped code-index-modulation downlink: codebooks, "
                    "BER bounds and Monte Carlo link simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_book = sub.add_parser("codebook", help="emit the grouped codebook as JSON")
    p_book.add_argument("--lc", type=int, required=True, help="code length (power of 2)")
    p_book.add_argument("--nu", type=int, required=True, help="number of users")
    p_book.add_argument("--nc", type=int, required=True, help="codes per user")
    p_book.add_argument("--out", help="output JSON path (default: stdout)")

    p_an = sub.add_parser("analyze", help="evaluate the closed-form BER upper bound")
    p_an.add_argument("--nt", type=int, required=True, help="transmit antennas")
    p_an.add_argument("--nu", type=int, required=True, help="number of users")
    p_an.add_argument("--lc", type=int, required=True, help="code length (power of 2)")
    p_an.add_argument("--nc", type=int, required=True, help="codes per user (power of 2, >= 2)")
    p_an.add_argument("--sigma", type=_parse_sigmas, default=(1.0,),
                      help="fading variances, comma separated (single value is shared)")
    p_an.add_argument("--snr-db", type=_parse_snr_grid, required=True,
                      help="chip SNR grid in dB: start:stop:step or comma list")
    p_an.add_argument("--out", help="output CSV path (default: stdout)")

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo BER sweep")
    p_sim.add_argument("--lc", type=int, required=True, help="code length (power of 2)")
    p_sim.add_argument("--nt", type=int, required=True, help="transmit antennas")
    p_sim.add_argument("--nu", type=int, required=True, help="number of users")
    p_sim.add_argument("--nc", type=int, required=True, help="codes per user (power of 2, >= 2)")
    p_sim.add_argument("--sigma", type=_parse_sigmas, default=(1.0,),
                       help="fading variances, comma separated (single value is shared)")
    p_sim.add_argument("--snr-db", type=_parse_snr_grid, required=True,
                       help="chip SNR grid in dB: start:stop:step or comma list")
    p_sim.add_argument("--mode", choices=("broadcast", "unicast"), default="broadcast",
                       help="common-bit traffic mode (default: broadcast)")
    p_sim.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    p_sim.add_argument("--min-errors", type=int, default=100,
                       help="bit errors to collect per user per point (default: 100)")
    p_sim.add_argument("--max-symbols", type=int, default=10_000_000,
                       help="symbol budget per point (default: 10000000)")
    p_sim.add_argument("--workers", type=int, default=1,
                       help="worker processes; any value gives identical output")
    p_sim.add_argument("--out", required=True, help="output CSV path")
    return parser


def _cmd_codebook(args: argparse.Namespace) -> int:
    book = generate_hadamard(args.lc)
    grouping = group_codebook(book, args.nu, args.nc)
    payload = {
        "length": book.length,
        "rows": book.matrix.tolist(),
        "assignment": {
            str(u): list(grouping.rows_for_user(u))
            for u in range(1, args.nu + 1)
        },
    }
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    variances = _variances(args.sigma, args.nu)
    config = SystemConfig(
        num_tx_antennas=args.nt,
        num_users=args.nu,
        code_length=args.lc,
        codes_per_user=args.nc,
        fading_variances=variances,
    )
    lines = ["snr_db,bound_ber,flags"]
    for snr_db in args.snr_db:
        bound = upper_bound_ber(BoundParams(
            num_tx_antennas=config.num_tx_antennas,
            codes_per_user=config.codes_per_user,
            code_length=config.code_length,
            power_coeff=config.power_coeff,
            chip_snr=10.0 ** (snr_db / 10.0),
        ))
        flag = "ok" if bound <= 1.0 else "bound_loose"
        lines.append(f"{snr_db:g},{bound:.10e},{flag}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    variances = _variances(args.sigma, args.nu)
    config = SystemConfig(
        num_tx_antennas=args.nt,
        num_users=args.nu,
        code_length=args.lc,
        codes_per_user=args.nc,
        fading_variances=variances,
        traffic_mode=args.mode,
    )
    spec = SweepSpec(
        config=config,
        snr_grid_db=args.snr_db,
        min_bit_errors=args.min_errors,
        max_symbols=args.max_symbols,
        master_seed=args.seed,
        block_symbols=8192,
    )
    result = run_sweep(spec, workers=args.workers)
    result.to_csv(args.out)
    sidecar = os.path.splitext(args.out)[0] + ".json"
    result.write_sidecar(sidecar)
    for snr_db in spec.snr_grid_db:
        per_ue = [r for r in result.rows if r.snr_db == snr_db]
        bers = " ".join(f"ue{r.ue}={r.ber_sim:.3e}" for r in per_ue)
        print(f"snr {snr_db:g} dB: bound={per_ue[0].ber_bound:.3e} {bers}")
    print(f"wrote {args.out} and {sidecar} "
          f"(seed={spec.master_seed}, hash={result.config_hash[:12]}, "
          f"{result.wall_time_s:.1f}s)")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "codebook":
            return _cmd_codebook(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        return _cmd_simulate(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
