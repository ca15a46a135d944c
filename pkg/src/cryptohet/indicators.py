"""Market snapshots, log-scale distribution profiles and cross-correlation tables."""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from .correlation import DEFAULT_MIN_OVERLAP, pearson
from .errors import (
    InsufficientOverlap,
    InvalidSnapshot,
    NothingToBin,
    UnknownIndicator,
    ZeroVariance,
)
from .timeseries import check_coin_id

INDICATORS = (
    "market_cap",
    "price",
    "volume_24h",
    "reddit_subscribers",
    "facebook_likes",
    "twitter_followers",
    "chain_tx_24h",
    "mining_difficulty",
)
COUNT_INDICATORS = ("reddit_subscribers", "facebook_likes", "twitter_followers", "chain_tx_24h")
# market-data trio and the social/on-chain rows checked against price and market cap
MARKET_INDICATORS = ("market_cap", "price", "volume_24h")
XCORR_INDICATORS = ("volume_24h", "chain_tx_24h", "mining_difficulty",
                    "reddit_subscribers", "facebook_likes", "twitter_followers")

RAW = "raw"
LOG10 = "log10"
TRANSFORMS = (RAW, LOG10)


def check_indicator(name: str) -> str:
    if name not in INDICATORS:
        raise UnknownIndicator(f"unknown indicator {name!r}; known: {', '.join(INDICATORS)}")
    return name


@dataclass(frozen=True)
class MarketSnapshot:
    """One coin's indicators on one UTC day. ``None`` means not reported."""

    coin: str
    as_of: dt.date
    market_cap: float | None = None
    price: float | None = None
    volume_24h: float | None = None
    reddit_subscribers: int | None = None
    facebook_likes: int | None = None
    twitter_followers: int | None = None
    chain_tx_24h: int | None = None
    mining_difficulty: float | None = None

    def __post_init__(self):
        check_coin_id(self.coin)
        present = 0
        for name in INDICATORS:
            v = getattr(self, name)
            if v is None:
                continue
            present += 1
            if isinstance(v, float) and not math.isfinite(v):
                raise InvalidSnapshot(f"{self.coin}: {name} must be finite, got {v!r}")
            if name == "price" and v <= 0:
                raise InvalidSnapshot(f"{self.coin}: price must be > 0, got {v!r}")
            if v < 0:
                raise InvalidSnapshot(f"{self.coin}: {name} must be >= 0, got {v!r}")
        if present == 0:
            raise InvalidSnapshot(f"{self.coin}: snapshot has no indicator values")

    def get(self, name: str):
        return getattr(self, check_indicator(name))

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class LogHistogram:
    indicator: str
    included: int
    excluded_nonpositive: int
    bins: tuple[tuple[float, float, int], ...]
    log_mean: float
    log_stddev: float
    log_skewness: float


def _moments(x: np.ndarray) -> tuple[float, float, float]:
    # population (biased) estimators throughout
    mean = float(np.mean(x))
    dev = x - mean
    m2 = float(np.mean(dev ** 2))
    m3 = float(np.mean(dev ** 3))
    skew = 0.0 if m2 == 0 else m3 / m2 ** 1.5
    return mean, math.sqrt(m2), skew


def _equal_width_counts(x: np.ndarray, bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Counts over equal-width bins spanning [min, max].

    Positions within 1e-9 of a bin edge snap to it, so ulp-level noise (e.g.
    from rescaling the inputs) cannot move a value across an edge. A
    zero-width range becomes [min, min + 1] with everything in the first bin.
    """
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        hi = lo + 1.0
    pos = (x - lo) / (hi - lo) * bins
    snapped = np.where(np.abs(pos - np.round(pos)) < 1e-9, np.round(pos), pos)
    idx = np.clip(np.floor(snapped).astype(int), 0, bins - 1)
    return np.bincount(idx, minlength=bins), np.linspace(lo, hi, bins + 1)


def log_histogram(snapshots: Sequence[MarketSnapshot], indicator: str, bins: int = 20) -> LogHistogram:
    """Histogram and moments of log10(indicator) across coins.

    Absent values are ignored; zero values cannot be logged and are counted
    in ``excluded_nonpositive``. Bins are equal-width over [min, max].
    """
    check_indicator(indicator)
    if bins < 1:
        raise ValueError("bins must be >= 1")
    present = np.array([v for v in (s.get(indicator) for s in snapshots) if v is not None], dtype=float)
    positive = present[present > 0]
    if positive.size == 0:
        raise NothingToBin(f"{indicator}: no positive values")
    logs = np.log10(positive)
    counts, edges = _equal_width_counts(logs, bins)
    mean, sd, skew = _moments(logs)
    return LogHistogram(
        indicator=indicator,
        included=int(positive.size),
        excluded_nonpositive=int(present.size - positive.size),
        bins=tuple((float(edges[k]), float(edges[k + 1]), int(counts[k])) for k in range(bins)),
        log_mean=mean,
        log_stddev=sd,
        log_skewness=skew,
    )


@dataclass(frozen=True)
class CrossCorrelationRow:
    """Correlation of one indicator with price and with market cap.

    An ``r_*`` of None marks an unavailable cell (too little overlap or a
    constant column); ``n_*`` is the pair count actually used and
    ``dropped_*`` the pairs lost to the log transform.
    """

    indicator: str
    r_vs_price: float | None
    n_price: int
    dropped_price: int
    r_vs_market_cap: float | None
    n_market_cap: int
    dropped_market_cap: int


@dataclass(frozen=True)
class CrossCorrelationTable:
    rows: tuple[CrossCorrelationRow, ...]
    transform: str
    min_overlap: int

    def row(self, indicator: str) -> CrossCorrelationRow:
        for r in self.rows:
            if r.indicator == indicator:
                return r
        raise KeyError(indicator)


def _cell(snapshots, indicator, target, transform, min_overlap):
    pairs = [(s.get(indicator), s.get(target)) for s in snapshots]
    pairs = [(a, b) for a, b in pairs if a is not None and b is not None]
    dropped = 0
    if transform == LOG10:
        kept = [(a, b) for a, b in pairs if a > 0 and b > 0]
        dropped = len(pairs) - len(kept)
        pairs = [(math.log10(a), math.log10(b)) for a, b in kept]
    try:
        r = pearson([a for a, _ in pairs], [b for _, b in pairs], min_overlap)
    except (InsufficientOverlap, ZeroVariance):
        r = None
    return r, len(pairs), dropped


def cross_correlation(snapshots: Sequence[MarketSnapshot],
                      indicators: Sequence[str] = XCORR_INDICATORS,
                      transform: str = RAW,
                      min_overlap: int = DEFAULT_MIN_OVERLAP) -> CrossCorrelationTable:
    """Pearson correlation of each indicator against price and market cap.

    Each cell uses only coins reporting both fields; under ``log10`` pairs
    with a non-positive member are also dropped and counted.
    """
    if transform not in TRANSFORMS:
        raise ValueError(f"transform must be one of {TRANSFORMS}, got {transform!r}")
    for name in indicators:
        check_indicator(name)
    rows = []
    for name in indicators:
        rp, np_, dp = _cell(snapshots, name, "price", transform, min_overlap)
        rm, nm, dm = _cell(snapshots, name, "market_cap", transform, min_overlap)
        rows.append(CrossCorrelationRow(name, rp, np_, dp, rm, nm, dm))
    return CrossCorrelationTable(tuple(rows), transform, int(min_overlap))
