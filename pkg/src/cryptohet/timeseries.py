"""Daily price series, log returns and return panels."""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateCoin,
    DuplicateDate,
    EmptyIntersection,
    InvalidDate,
    NonPositivePrice,
    OutOfOrderDate,
    TooShort,
)

INTERSECTION = "intersection"
UNION = "union-with-missing"
# "union" is accepted as shorthand
ALIGN_POLICIES = (INTERSECTION, UNION, "union")

_ISO_DAY = re.compile(r"^\d{4}-\d{2}-\d{2}$")


def parse_day(value: str | dt.date) -> dt.date:
    """Parse a UTC calendar day. Anything carrying a time of day is rejected."""
    if isinstance(value, dt.datetime):
        raise InvalidDate(f"intraday timestamp not allowed: {value.isoformat()}")
    if isinstance(value, dt.date):
        return value
    if not isinstance(value, str) or not _ISO_DAY.match(value):
        raise InvalidDate(f"expected YYYY-MM-DD, got {value!r}")
    try:
        return dt.date.fromisoformat(value)
    except ValueError as exc:
        raise InvalidDate(f"invalid calendar day {value!r}") from exc


def check_coin_id(coin: str) -> str:
    if not isinstance(coin, str) or not coin.strip():
        raise ValueError(f"coin id must be non-empty text, got {coin!r}")
    return coin


@dataclass(frozen=True)
class PriceSeries:
    """Daily closing prices (USD) of one coin, dates strictly increasing."""

    coin: str
    dates: tuple[dt.date, ...]
    closes: tuple[float, ...]

    @property
    def points(self) -> list[tuple[dt.date, float]]:
        return list(zip(self.dates, self.closes))

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnSeries:
    coin: str
    dates: tuple[dt.date, ...]
    returns: tuple[float, ...]

    @property
    def points(self) -> list[tuple[dt.date, float]]:
        return list(zip(self.dates, self.returns))

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True, eq=False)
class ReturnPanel:
    """Coins x dates matrix of log returns.

    Missing cells hold NaN; ``present`` gives the mask. A present cell is
    always finite, and a zero is a real observation.
    """

    coins: tuple[str, ...]
    dates: tuple[dt.date, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.coins), len(self.dates)):
            raise ValueError(f"values shape {values.shape} does not match "
                             f"{len(self.coins)} coins x {len(self.dates)} dates")
        if len(set(self.coins)) != len(self.coins):
            raise DuplicateCoin("coin ids in a panel must be distinct")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise OutOfOrderDate("panel dates must be strictly increasing")
        if np.isinf(values).any():
            raise ValueError("panel cells must be finite or missing")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def present(self) -> np.ndarray:
        return ~np.isnan(self.values)

    def row(self, coin: str) -> np.ndarray:
        return self.values[self.coins.index(coin)]

    @property
    def n_missing(self) -> int:
        return int(np.isnan(self.values).sum())


def validate_prices(coin: str, raw: Iterable[tuple[str | dt.date, float]]) -> PriceSeries:
    """Check raw (date, close) pairs and build a :class:`PriceSeries`.

    Input must already be in date order; out-of-order rows are reported, not
    sorted away.
    """
    check_coin_id(coin)
    dates: list[dt.date] = []
    closes: list[float] = []
    for k, (day, close) in enumerate(raw):
        day = parse_day(day)
        close = float(close)
        if not np.isfinite(close) or close <= 0:
            raise NonPositivePrice(f"{coin}: close {close!r} on {day} (point {k}) must be > 0")
        if dates and day == dates[-1]:
            raise DuplicateDate(f"{coin}: duplicate date {day} (point {k})")
        if dates and day < dates[-1]:
            raise OutOfOrderDate(f"{coin}: {day} follows {dates[-1]} (point {k})")
        dates.append(day)
        closes.append(close)
    if len(dates) < 2:
        raise TooShort(f"{coin}: need at least 2 prices, got {len(dates)}")
    return PriceSeries(coin, tuple(dates), tuple(closes))


def log_returns(series: PriceSeries) -> ReturnSeries:
    """Natural-log returns ln(close[k+1] / close[k]), dated at the later day.

    Gaps between dates are not rescaled.
    """
    if len(series) < 2:
        raise TooShort(f"{series.coin}: need at least 2 prices, got {len(series)}")
    closes = np.asarray(series.closes, dtype=float)
    rets = np.log(closes[1:] / closes[:-1])
    return ReturnSeries(series.coin, series.dates[1:], tuple(float(r) for r in rets))


def align_returns(series: Sequence[ReturnSeries], policy: str = INTERSECTION) -> ReturnPanel:
    """Stack return series into a panel.

    ``intersection`` keeps the dates every series has; ``union-with-missing``
    (or ``union``) keeps all dates and marks absent cells missing. Coin order follows the input.
    """
    if policy not in ALIGN_POLICIES:
        raise ValueError(f"unknown alignment policy {policy!r}; expected one of {ALIGN_POLICIES}")
    if not series:
        raise ValueError("need at least one return series")
    coins = [s.coin for s in series]
    seen = set()
    for c in coins:
        if c in seen:
            raise DuplicateCoin(f"coin {c!r} appears more than once")
        seen.add(c)

    day_sets = [set(s.dates) for s in series]
    if policy == INTERSECTION:
        days = sorted(set.intersection(*day_sets))
        if not days:
            raise EmptyIntersection(f"no date is shared by all {len(series)} series")
    else:
        days = sorted(set.union(*day_sets))

    col = {d: j for j, d in enumerate(days)}
    values = np.full((len(series), len(days)), np.nan)
    for i, s in enumerate(series):
        for d, r in zip(s.dates, s.returns):
            j = col.get(d)
            if j is not None:
                values[i, j] = r
    return ReturnPanel(tuple(coins), tuple(days), values)
