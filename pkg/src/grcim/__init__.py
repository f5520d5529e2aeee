"""Link-level simulator and analysis toolkit for a grouped
code-index-modulation multi-user downlink.

The transmitter spreads each user's data over a private subset of
orthogonal codes: the chosen code index carries bits on each quadrature
rail, and the code itself is modulated by one BPSK bit per rail.  A
zero-forcing-style beamformer with per-user power balancing separates the
users spatially.  This package provides the codebook construction, the
per-symbol modem, the channel and beamforming model, closed-form
performance analysis, and a deterministic Monte Carlo sweep engine with a
command line front end.
"""

from .errors import CapacityError, FramingError, GridAlignmentError
from .codebook import WalshCodebook, CodeGrouping, generate_hadamard, group_codebook
from .modem import (
    BPSK_AMPLITUDE,
    CimSymbol,
    CorrelatorBank,
    bits_to_symbol,
    symbol_to_bits,
    bpsk_value,
    modulate,
    correlate,
    ml_detect,
)
from .channel import (
    SystemConfig,
    ChannelRealization,
    ReceivedFrame,
    draw_channel,
    zf_precode,
    apply_channel,
)
from .analysis import (
    BoundParams,
    ComparisonReport,
    SpectrumUtilization,
    q_function,
    conditional_pep,
    rayleigh_diversity_tail,
    upper_bound_ber,
    rates,
    spectrum_utilization,
    max_users,
    comparison_report,
    eb_db_from_chip_snr_db,
    chip_snr_db_from_eb_db,
)
from .engine import (
    SweepSpec,
    PointResult,
    BerSweepResult,
    run_sweep,
    CurvePoint,
    OrderingClaim,
    ComparisonTable,
    compare_configs,
    CSV_COLUMNS,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "FramingError",
    "GridAlignmentError",
    "WalshCodebook",
    "CodeGrouping",
    "generate_hadamard",
    "group_codebook",
    "BPSK_AMPLITUDE",
    "CimSymbol",
    "CorrelatorBank",
    "bits_to_symbol",
    "symbol_to_bits",
    "bpsk_value",
    "modulate",
    "correlate",
    "ml_detect",
    "SystemConfig",
    "ChannelRealization",
    "ReceivedFrame",
    "draw_channel",
    "zf_precode",
    "apply_channel",
    "BoundParams",
    "ComparisonReport",
    "SpectrumUtilization",
    "q_function",
    "conditional_pep",
    "rayleigh_diversity_tail",
    "upper_bound_ber",
    "rates",
    "spectrum_utilization",
    "max_users",
    "comparison_report",
    "eb_db_from_chip_snr_db",
    "chip_snr_db_from_eb_db",
    "SweepSpec",
    "PointResult",
    "BerSweepResult",
    "run_sweep",
    "CurvePoint",
    "OrderingClaim",
    "ComparisonTable",
    "compare_configs",
    "CSV_COLUMNS",
    "__version__",
]
