"""Semilog BER-vs-SNR figure rendering from sweep result CSVs.

Input is one or more CSV files in the simulator's documented schema

    ue,snr_db,ber_sim,ber_bound,ber_private,ber_common,bits,errors,flag

plus, optionally, the JSON sidecar the simulator writes next to each CSV
(same basename, .json suffix).  When a sidecar is present its
configuration block drives the legend label and groups files into one
panel per code length; without one the file name stem is the label.

Each (file, user) pair becomes one curve: the analytical bound as a line
and the simulated BER as unconnected markers in the same color.  The
y-axis is logarithmic, so exact-zero BER points cannot be shown at their
value; they are clipped to a 1e-7 axis floor and drawn with a distinct
hollow marker so error-free points stay visible and recognizable.

Rendering never modifies its inputs, and the output bytes depend only on
the input files (fixed figure metadata, no timestamps).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = [
    "AXIS_FLOOR",
    "REQUIRED_COLUMNS",
    "SchemaError",
    "CurveSet",
    "SourceFile",
    "RenderSummary",
    "load_source",
    "render",
    "main",
]

REQUIRED_COLUMNS = (
    "ue", "snr_db", "ber_sim", "ber_bound", "bits", "errors", "flag",
)
AXIS_FLOOR = 1e-7


class SchemaError(ValueError):
    """Raised when an input CSV does not match the documented schema."""


@dataclass(frozen=True)
class CurveSet:
    """One plottable curve: a single user of a single results file."""

    label: str
    ue: int
    snr_db: tuple[float, ...]
    ber_sim: tuple[float, ...]
    ber_bound: tuple[float, ...]
    zero_sim: tuple[bool, ...]

    def __post_init__(self) -> None:
        if any(a >= b for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ValueError("curve points must be sorted by snr_db")


@dataclass(frozen=True)
class SourceFile:
    """One parsed results CSV plus its sidecar-derived metadata."""

    path: str
    label: str
    panel_key: str
    curves: tuple[CurveSet, ...]


@dataclass(frozen=True)
class RenderSummary:
    """What a render call drew, for callers and tests."""

    out_path: str
    panels: int
    curves: int
    points: int
    clipped_points: int


def _sidecar_label(csv_path: str) -> tuple[str | None, str | None]:
    """(legend label, panel key) from the sidecar, or (None, None)."""
    sidecar = os.path.splitext(csv_path)[0] + ".json"
    if not os.path.exists(sidecar):
        return None, None
    try:
        with open(sidecar) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{sidecar}: unreadable sidecar: {exc}") from exc
    config = data.get("config")
    if not isinstance(config, dict):
        return None, None
    try:
        label = (
            f"lc{config['code_length']}"
            f"nt{config['num_tx_antennas']}"
            f"nu{config['num_users']}"
            f"nc{config['codes_per_user']}"
            f".{config['traffic_mode']}"
        )
        panel = f"Lc={config['code_length']}"
    except KeyError:
        return None, None
    return label, panel


def _parse_row(path: str, line_no: int, row: dict) -> tuple[int, float, float, float]:
    def get(column: str, cast):
        raw = row.get(column)
        if raw is None:
            raise SchemaError(f"{path} line {line_no}: row is missing column {column!r}")
        try:
            return cast(raw)
        except ValueError as exc:
            raise SchemaError(
                f"{path} line {line_no}: bad value {raw!r} in column {column!r}"
            ) from exc

    return (
        get("ue", int),
        get("snr_db", float),
        get("ber_sim", float),
        get("ber_bound", float),
    )


def load_source(csv_path: str) -> SourceFile:
    """Parse one results CSV (and sidecar, if any) into plottable curves."""
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{csv_path}: empty CSV, nothing to plot")
        missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise SchemaError(
                f"{csv_path}: missing required column(s): {', '.join(missing)}"
            )
        parsed = [
            _parse_row(csv_path, line_no, row)
            for line_no, row in enumerate(reader, start=2)
        ]
    if not parsed:
        raise SchemaError(f"{csv_path}: no data rows")

    label, panel = _sidecar_label(csv_path)
    if label is None:
        label = os.path.splitext(os.path.basename(csv_path))[0]
        panel = "results"

    by_ue: dict[int, list[tuple[float, float, float]]] = {}
    for ue, snr_db, ber_sim, ber_bound in parsed:
        by_ue.setdefault(ue, []).append((snr_db, ber_sim, ber_bound))
    curves = []
    for ue in sorted(by_ue):
        pts = sorted(by_ue[ue])
        curves.append(CurveSet(
            label=label,
            ue=ue,
            snr_db=tuple(p[0] for p in pts),
            ber_sim=tuple(p[1] for p in pts),
            ber_bound=tuple(p[2] for p in pts),
            zero_sim=tuple(p[1] == 0.0 for p in pts),
        ))
    return SourceFile(path=csv_path, label=label, panel_key=panel, curves=tuple(curves))


def render(
    csv_paths: list[str],
    out_path: str,
    title: str | None = None,
    xlim: tuple[float, float] | None = None,
    ylim: tuple[float, float] | None = None,
) -> RenderSummary:
    """Draw every curve of every input CSV into one figure file.

    Files are grouped into one panel per code length (sidecar-labeled
    files) or into a shared panel (unlabeled files).  All inputs are
    parsed before any drawing starts, so a schema error never leaves a
    partial figure behind.
    """
    if not csv_paths:
        raise ValueError("need at least one input CSV path")
    sources = [load_source(p) for p in csv_paths]

    panel_keys: list[str] = []
    for src in sources:
        if src.panel_key not in panel_keys:
            panel_keys.append(src.panel_key)

    fig, axes = plt.subplots(
        1, len(panel_keys),
        figsize=(6.4 * len(panel_keys), 4.8),
        squeeze=False,
    )
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    curve_count = 0
    point_count = 0
    clipped_count = 0
    for key, ax in zip(panel_keys, axes[0]):
        per_panel = 0
        for src in sources:
            if src.panel_key != key:
                continue
            for curve in src.curves:
                color = colors[per_panel % len(colors)]
                per_panel += 1
                curve_count += 1
                point_count += len(curve.snr_db)
                name = f"{curve.label} ue{curve.ue}"
                bound = [max(b, AXIS_FLOOR) for b in curve.ber_bound]
                ax.semilogy(curve.snr_db, bound, color=color, linestyle="-",
                            linewidth=1.2, label=f"{name} bound")
                shown = [
                    (s, b) for s, b, z in zip(curve.snr_db, curve.ber_sim, curve.zero_sim)
                    if not z
                ]
                if shown:
                    ax.semilogy([p[0] for p in shown], [p[1] for p in shown],
                                color=color, marker="o", linestyle="none",
                                markersize=4.5, label=f"{name} sim")
                clipped = [s for s, z in zip(curve.snr_db, curve.zero_sim) if z]
                if clipped:
                    clipped_count += len(clipped)
                    ax.semilogy(clipped, [AXIS_FLOOR] * len(clipped),
                                color=color, marker="v", linestyle="none",
                                markersize=5.5, fillstyle="none",
                                label=f"{name} sim (error-free, clipped)")
        ax.set_xlabel("chip SNR, Ec/N0 (dB)")
        ax.set_ylabel("BER")
        ax.set_title(key if len(panel_keys) > 1 or key != "results" else "")
        ax.grid(True, which="both", alpha=0.3)
        ax.set_ylim(*(ylim if ylim else (AXIS_FLOOR * 0.5, 1.0)))
        if xlim:
            ax.set_xlim(*xlim)
        ax.legend(fontsize=7)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150, metadata={"Software": "ber-plots"})
    plt.close(fig)
    return RenderSummary(
        out_path=out_path,
        panels=len(panel_keys),
        curves=curve_count,
        points=point_count,
        clipped_points=clipped_count,
    )


def _parse_limits(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad axis limits {text!r}: {exc}") from exc
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"need lo < hi in {text!r}")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ber-plot",
        description="Render semilog BER-vs-SNR figures (bound lines plus "
                    "simulation markers) from sweep result CSVs.",
    )
    parser.add_argument("csvs", nargs="+", help="input results CSV paths")
    parser.add_argument("--out", required=True, help="output figure path (.png)")
    parser.add_argument("--title", help="figure title")
    parser.add_argument("--xlim", type=_parse_limits, help="x axis range, lo:hi (dB)")
    parser.add_argument("--ylim", type=_parse_limits, help="y axis range, lo:hi (BER)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        summary = render(args.csvs, args.out, title=args.title,
                         xlim=args.xlim, ylim=args.ylim)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {summary.out_path}: {summary.panels} panel(s), "
          f"{summary.curves} curve(s), {summary.points} points "
          f"({summary.clipped_points} clipped at the {AXIS_FLOOR:g} floor)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
