"""Herfindahl-Hirschman index, Gini coefficient and concentration reports."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import AllZero, NegativeValue

if TYPE_CHECKING:
    from .indicators import MarketSnapshot

HHI_SCALE = 10000
COMPETITIVE_BELOW = 1500
HIGHLY_CONCENTRATED_ABOVE = 2500
DISPARITY_GINI = 0.5

COMPETITIVE = "competitive"
MODERATE = "moderately-concentrated"
HIGH = "highly-concentrated"


@dataclass(frozen=True)
class ConcentrationResult:
    indicator: str
    n: int
    skipped: int
    hhi_raw: float
    hhi_scaled: float
    gini: float
    hhi_class: str
    disparity_flag: bool


def _shares(values: Sequence[float]) -> np.ndarray:
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise AllZero("empty input")
    if np.isnan(x).any():
        raise ValueError("NaN in input")
    if (x < 0).any():
        raise NegativeValue(f"negative value {x[x < 0][0]!r}")
    total = math.fsum(x)
    if total <= 0:
        raise AllZero("every value is zero")
    return x / total


def hhi(values: Sequence[float]) -> tuple[float, float]:
    """Return ``(raw, scaled)`` HHI; raw is the sum of squared shares."""
    s = _shares(values)
    raw = math.fsum(s * s)
    return raw, raw * HHI_SCALE


def gini(values: Sequence[float]) -> float:
    """Gini coefficient via the rank-weighted form on ascending-sorted values.

    Working on shares with integer weights (2i - n - 1) keeps the all-equal
    case at exactly 0 and the single-holder case at exactly (n - 1) / n.
    """
    s = np.sort(_shares(values))
    n = s.size
    weights = 2.0 * np.arange(1, n + 1) - n - 1
    g = math.fsum(weights * s) / n
    return min(max(g, 0.0), (n - 1) / n)


def classify_hhi(hhi_scaled: float) -> str:
    if hhi_scaled < COMPETITIVE_BELOW:
        return COMPETITIVE
    if hhi_scaled <= HIGHLY_CONCENTRATED_ABOVE:
        return MODERATE
    return HIGH


def concentrate(indicator: str, values: Sequence[float], skipped: int = 0) -> ConcentrationResult:
    raw, scaled = hhi(values)
    g = gini(values)
    return ConcentrationResult(
        indicator=indicator,
        n=len(values),
        skipped=skipped,
        hhi_raw=raw,
        hhi_scaled=scaled,
        gini=g,
        hhi_class=classify_hhi(scaled),
        disparity_flag=g >= DISPARITY_GINI,
    )


def concentration_report(snapshots: Sequence[MarketSnapshot],
                         indicators: Sequence[str]) -> list[ConcentrationResult]:
    """One :class:`ConcentrationResult` per indicator.

    Coins lacking an indicator are skipped and counted in ``skipped``.
    """
    from .indicators import check_indicator

    if not snapshots:
        raise ValueError("need at least one snapshot")
    for name in indicators:
        check_indicator(name)
    out = []
    for name in indicators:
        vals = [s.get(name) for s in snapshots]
        present = [v for v in vals if v is not None]
        try:
            out.append(concentrate(name, present, skipped=len(vals) - len(present)))
        except AllZero as exc:
            raise AllZero(f"{name}: {exc}") from exc
    return out
