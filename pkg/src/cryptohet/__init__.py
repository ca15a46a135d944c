"""Co-movement and concentration analytics for cryptocurrency markets."""

__version__ = "0.1.0"

from .concentration import ConcentrationResult, classify_hhi, concentration_report, gini, hhi
from .correlation import (
    CorrelationMatrix,
    DistributionSummary,
    anchor_distribution,
    offdiagonal_distribution,
    partial_correlation,
    partial_matrix,
    pearson,
    pearson_matrix,
)
from .indicators import MarketSnapshot, cross_correlation, log_histogram
from .timeseries import PriceSeries, ReturnPanel, ReturnSeries, align_returns, log_returns, validate_prices

__all__ = [
    "ConcentrationResult", "CorrelationMatrix", "DistributionSummary", "MarketSnapshot",
    "PriceSeries", "ReturnPanel", "ReturnSeries", "align_returns", "anchor_distribution",
    "classify_hhi", "concentration_report", "cross_correlation", "gini", "hhi", "log_histogram",
    "log_returns", "offdiagonal_distribution", "partial_correlation", "partial_matrix",
    "pearson", "pearson_matrix", "validate_prices",
]
