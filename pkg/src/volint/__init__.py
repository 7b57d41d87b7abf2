"""Return-interval analysis of threshold exceedances in volatility series.

The library turns tick data into minute-mark prices, builds deseasonalized
unit-variance volatility, extracts return intervals between threshold
exceedances, tests interval distributions for threshold-independent scaling,
fits the stretched-exponential family with bootstrap goodness of fit, and
computes moment-based multiscaling diagnostics.
"""

from .config import RunConfig, derive_seed, validate_config
from .errors import (
    ConfigError,
    DataError,
    DegeneratePatternError,
    EmptySeriesError,
    FitFailureError,
    FormatError,
    InsufficientEventsError,
    InsufficientPointsError,
    MomentOverflowError,
    NoOverlapError,
    StageError,
    StatError,
    UnreachableTargetError,
    VolintError,
    ZeroVarianceError,
)
from .ingest import (
    MinuteSeries,
    ParsedTicks,
    TickRecord,
    TradingCalendar,
    parse_ticks,
    sample_minutely,
    tick_days,
    write_minute_csv,
)
from .intervals import (
    CdfTable,
    IntervalSample,
    PdfTable,
    ThresholdResult,
    empirical_cdf,
    extract_intervals,
    scaled_pdf,
    threshold_for_mean,
)
from .kstest import (
    KsMatrix,
    KsPair,
    KsResult,
    bootstrap_pvalue,
    critical_value,
    ks_matrix,
    one_sample_ks,
    two_sample_ks,
)
from .moments import (
    AlphaFit,
    EssReport,
    MomentCurve,
    OrderCurve,
    empirical_moment,
    ess_mu,
    ess_xi,
    fit_alpha,
    moment_curve,
    moment_vs_order,
)
from .pipeline import load_normalized, run_analyze
from .semodel import (
    FitReport,
    SEModel,
    analytic_moment,
    fit_lsq,
    fit_mle,
    normalization_c,
    se_cdf,
    se_sample,
)
from .synth import SynthSpec, gen_iid_volatility, generate_minute_csv, shuffle_series
from .volatility import (
    IntradayPattern,
    NormVolSeries,
    VolSeries,
    compute_volatility,
    deseasonalize,
    intraday_pattern,
    normalize,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaFit",
    "CdfTable",
    "ConfigError",
    "DataError",
    "DegeneratePatternError",
    "EmptySeriesError",
    "EssReport",
    "FitFailureError",
    "FitReport",
    "FormatError",
    "InsufficientEventsError",
    "InsufficientPointsError",
    "IntervalSample",
    "IntradayPattern",
    "KsMatrix",
    "KsPair",
    "KsResult",
    "MinuteSeries",
    "MomentCurve",
    "MomentOverflowError",
    "NoOverlapError",
    "NormVolSeries",
    "OrderCurve",
    "ParsedTicks",
    "PdfTable",
    "RunConfig",
    "SEModel",
    "StageError",
    "StatError",
    "SynthSpec",
    "ThresholdResult",
    "TickRecord",
    "TradingCalendar",
    "UnreachableTargetError",
    "VolSeries",
    "VolintError",
    "ZeroVarianceError",
    "analytic_moment",
    "bootstrap_pvalue",
    "compute_volatility",
    "critical_value",
    "derive_seed",
    "deseasonalize",
    "empirical_cdf",
    "empirical_moment",
    "ess_mu",
    "ess_xi",
    "extract_intervals",
    "fit_alpha",
    "fit_lsq",
    "fit_mle",
    "gen_iid_volatility",
    "generate_minute_csv",
    "intraday_pattern",
    "ks_matrix",
    "load_normalized",
    "moment_curve",
    "moment_vs_order",
    "normalization_c",
    "normalize",
    "one_sample_ks",
    "parse_ticks",
    "run_analyze",
    "sample_minutely",
    "scaled_pdf",
    "se_cdf",
    "se_sample",
    "shuffle_series",
    "threshold_for_mean",
    "tick_days",
    "two_sample_ks",
    "validate_config",
    "write_minute_csv",
]
