"""Figure rendering for link-simulation BER sweep CSVs."""

from ber_plots.render import (
    AXIS_FLOOR,
    REQUIRED_COLUMNS,
    CurveSet,
    RenderSummary,
    SchemaError,
    SourceFile,
    load_source,
    main,
    render,
)

__all__ = [
    "AXIS_FLOOR",
    "REQUIRED_COLUMNS",
    "CurveSet",
    "RenderSummary",
    "SchemaError",
    "SourceFile",
    "load_source",
    "main",
    "render",
]
