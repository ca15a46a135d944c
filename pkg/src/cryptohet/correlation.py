"""Pearson and anchor-removed partial correlations over return panels.

Missing data is handled by pairwise-complete deletion. Both the scalar
:func:`pearson` and the matrix builders accumulate co-moments in a single
Welford-style pass, so matrix entries agree with the scalar function to
rounding.

For partial correlations the three input coefficients of a pair (i, j) are
all taken over the dates where i, j and the anchor are jointly observed.
That keeps the first-order partial-correlation identity exact: the result
equals the correlation of the residuals of i and j after regressing each on
the anchor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    AnchorMissing,
    DegenerateAnchor,
    InsufficientOverlap,
    OutOfRange,
    TooFewCoins,
    ZeroVariance,
)
from .timeseries import ReturnPanel

DEFAULT_MIN_OVERLAP = 3
DEFAULT_BINS = 50
RANGE_SLACK = 1e-9
DEGENERATE_TOL = 1e-12

PEARSON = "pearson"
PARTIAL = "partial"

# exclusion reasons
INSUFFICIENT_OVERLAP = "insufficient_overlap"
ZERO_VARIANCE = "zero_variance"
DEGENERATE_ANCHOR = "degenerate_anchor"
OUT_OF_RANGE = "out_of_range"


@dataclass(frozen=True)
class Exclusion:
    """A coin (``coin_b`` is None) or a pair left out of a matrix."""

    coin_a: str
    coin_b: str | None
    reason: str


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Symmetric correlation matrix over ``coins``.

    ``values[i, j]`` is NaN when that pair was excluded (see ``exclusions``);
    ``support[i, j]`` is the number of observations the entry was computed
    from, and the diagonal holds each coin's own observation count on the
    relevant support.
    """

    coins: tuple[str, ...]
    kind: str
    values: np.ndarray = field(repr=False)
    support: np.ndarray = field(repr=False)
    anchor: str | None = None
    exclusions: tuple[Exclusion, ...] = ()

    def __post_init__(self):
        k = len(self.coins)
        v = np.array(self.values, dtype=float).reshape(k, k)
        s = np.array(self.support, dtype=np.int64).reshape(k, k)
        if self.kind not in (PEARSON, PARTIAL):
            raise ValueError(f"unknown matrix kind {self.kind!r}")
        if self.kind == PARTIAL and (self.anchor is None or self.anchor in self.coins):
            raise ValueError("a partial matrix needs an anchor that is not among its coins")
        if k and not np.all(np.diag(v) == 1.0):
            raise ValueError("diagonal must be 1")
        both = ~np.isnan(v)
        if not np.array_equal(both, both.T) or not np.array_equal(v[both], v.T[both]):
            raise ValueError("matrix must be symmetric")
        if not np.array_equal(s, s.T):
            raise ValueError("support must be symmetric")
        if np.any(np.abs(v[both]) > 1 + RANGE_SLACK):
            raise ValueError("coefficient outside [-1, 1]")
        v.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "support", s)

    def get(self, a: str, b: str) -> float:
        return float(self.values[self.coins.index(a), self.coins.index(b)])

    def upper_triangle(self) -> np.ndarray:
        """Off-diagonal values, each unordered pair once, excluded pairs dropped."""
        iu = np.triu_indices(len(self.coins), k=1)
        vals = self.values[iu]
        return vals[~np.isnan(vals)]


@dataclass(frozen=True)
class DistributionSummary:
    count: int
    median: float
    mean: float
    stddev: float
    histogram: tuple[tuple[float, float, int], ...]


def _clamp(r: float) -> float:
    if r > 1.0:
        if r > 1.0 + RANGE_SLACK:
            raise OutOfRange(f"coefficient {r!r} exceeds 1")
        return 1.0
    if r < -1.0:
        if r < -1.0 - RANGE_SLACK:
            raise OutOfRange(f"coefficient {r!r} below -1")
        return -1.0
    return r


def _missing(v) -> bool:
    return v is None or (isinstance(v, float) and math.isnan(v))


def pearson(x: Sequence[float | None], y: Sequence[float | None],
            min_overlap: int = DEFAULT_MIN_OVERLAP) -> float:
    """Sample Pearson correlation of ``x`` and ``y``.

    Positions where either value is None or NaN are dropped first.
    """
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    min_overlap = max(int(min_overlap), 2)
    n = 0
    mx = my = 0.0
    sxx = syy = sxy = 0.0
    for a, b in zip(x, y):
        if _missing(a) or _missing(b):
            continue
        a = float(a)
        b = float(b)
        n += 1
        dx = a - mx
        dy = b - my
        mx += dx / n
        my += dy / n
        # deviations from the previous means; symmetric in (x, y) bit for bit
        w = (n - 1) / n
        sxx += w * (dx * dx)
        syy += w * (dy * dy)
        sxy += w * (dx * dy)
    if n < min_overlap:
        raise InsufficientOverlap(f"{n} overlapping observations, need {min_overlap}")
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("one of the series is constant over the common support")
    return _clamp(sxy / math.sqrt(sxx * syy))


def partial_correlation(rho_ij: float, rho_iB: float, rho_jB: float) -> float:
    """First-order partial correlation of i and j controlling for anchor B."""
    if abs(rho_iB) >= 1 - DEGENERATE_TOL or abs(rho_jB) >= 1 - DEGENERATE_TOL:
        raise DegenerateAnchor(f"anchor correlation at +-1 (rho_iB={rho_iB!r}, rho_jB={rho_jB!r})")
    num = rho_ij - rho_iB * rho_jB
    den = math.sqrt(1.0 - rho_iB * rho_iB) * math.sqrt(1.0 - rho_jB * rho_jB)
    return _clamp(num / den)


class _PairMoments:
    """Pairwise-complete co-moments of every row pair of ``X`` in one pass.

    Entry [i, j] of each array is taken over the dates where rows i and j
    (and the anchor, if given) are all present. Means and second moments of
    row i over that support live in ``mean[i, j]`` / ``m2[i, j]``; row j's
    are the transposes.
    """

    def __init__(self, X: np.ndarray, anchor: np.ndarray | None = None):
        k, T = X.shape
        self.n = np.zeros((k, k), dtype=np.int64)
        self.mean = np.zeros((k, k))
        self.m2 = np.zeros((k, k))
        self.cross = np.zeros((k, k))
        if anchor is not None:
            self.amean = np.zeros((k, k))
            self.am2 = np.zeros((k, k))
            self.across = np.zeros((k, k))  # row i with anchor, over support (i, j)
        for t in range(T):
            col = X[:, t]
            pres = ~np.isnan(col)
            if anchor is not None and np.isnan(anchor[t]):
                continue
            idx = np.flatnonzero(pres)
            if idx.size == 0:
                continue
            self._step(idx, col[idx], None if anchor is None else float(anchor[t]))

    def _step(self, idx, x, a):
        grid = np.ix_(idx, idx)
        n = self.n[grid] + 1
        self.n[grid] = n
        w = (n - 1) / n
        mean = self.mean[grid]
        dx = x[:, None] - mean
        self.mean[grid] = mean + dx / n
        self.m2[grid] += w * (dx * dx)
        self.cross[grid] += w * (dx * dx.T)
        if a is not None:
            amean = self.amean[grid]
            da = a - amean
            self.amean[grid] = amean + da / n
            self.am2[grid] += w * (da * da)
            self.across[grid] += w * (dx * da)


def _ratio(num: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        return num / np.sqrt(a * b)


def _mirror_upper(m: np.ndarray) -> np.ndarray:
    """Copy the upper triangle onto the lower one (accumulation order differs by side)."""
    upper = np.triu(np.ones(m.shape, dtype=bool), k=1)
    return np.where(upper, m, m.T)


def _single_row_stats(panel: ReturnPanel, min_overlap: int):
    """Coins whose own series cannot enter any correlation."""
    out = []
    for coin, row in zip(panel.coins, panel.values):
        obs = row[~np.isnan(row)]
        if obs.size < min_overlap:
            out.append(Exclusion(coin, None, INSUFFICIENT_OVERLAP))
        elif np.all(obs == obs[0]):
            out.append(Exclusion(coin, None, ZERO_VARIANCE))
    return out


def pearson_matrix(panel: ReturnPanel, min_overlap: int = DEFAULT_MIN_OVERLAP) -> CorrelationMatrix:
    """Pairwise-complete Pearson matrix of all coins in ``panel``.

    Coins that are constant or too short on their own are dropped and listed
    as coin-level exclusions. Pairs whose common support is too short or
    constant get a NaN entry and a pair-level exclusion.
    """
    if len(panel.coins) < 2:
        raise TooFewCoins(f"need at least 2 coins, panel has {len(panel.coins)}")
    min_overlap = max(int(min_overlap), 2)
    exclusions = _single_row_stats(panel, min_overlap)
    dropped = {e.coin_a for e in exclusions}
    keep = [i for i, c in enumerate(panel.coins) if c not in dropped]
    coins = tuple(panel.coins[i] for i in keep)
    X = panel.values[keep]

    mom = _PairMoments(X)
    r = np.clip(_ratio(mom.cross, mom.m2, mom.m2.T), -1.0, 1.0)
    bad_n = mom.n < min_overlap
    bad_var = (mom.m2 == 0) | (mom.m2.T == 0)
    values = _mirror_upper(np.where(bad_n | bad_var, np.nan, r))
    np.fill_diagonal(values, 1.0)
    support = mom.n.copy()

    for i in range(len(coins)):
        for j in range(i + 1, len(coins)):
            if bad_n[i, j]:
                exclusions.append(Exclusion(coins[i], coins[j], INSUFFICIENT_OVERLAP))
            elif bad_var[i, j]:
                exclusions.append(Exclusion(coins[i], coins[j], ZERO_VARIANCE))
    return CorrelationMatrix(coins, PEARSON, values, support, exclusions=tuple(exclusions))


def partial_matrix(panel: ReturnPanel, anchor: str,
                   min_overlap: int = DEFAULT_MIN_OVERLAP) -> CorrelationMatrix:
    """Correlations among all non-anchor coins with the anchor's influence removed.

    Coins perfectly correlated with the anchor (|rho| >= 1 - 1e-12) carry no
    residual signal and are excluded.
    """
    if anchor not in panel.coins:
        raise AnchorMissing(f"anchor {anchor!r} is not in the panel")
    a_row = panel.row(anchor)
    a_obs = a_row[~np.isnan(a_row)]
    if a_obs.size and np.all(a_obs == a_obs[0]):
        raise ZeroVariance(f"anchor {anchor!r} has constant returns")
    keep = [i for i, c in enumerate(panel.coins) if c != anchor]
    if len(keep) < 2:
        raise TooFewCoins(f"need at least 2 coins besides the anchor, got {len(keep)}")
    min_overlap = max(int(min_overlap), 2)

    mom = _PairMoments(panel.values[keep], anchor=a_row)
    coins_all = [panel.coins[i] for i in keep]
    r_ij = _ratio(mom.cross, mom.m2, mom.m2.T)
    r_ia = _ratio(mom.across, mom.m2, mom.am2)
    r_ja = r_ia.T

    # coin-level screening on each coin's own support with the anchor (diagonal)
    exclusions: list[Exclusion] = []
    alive = []
    for i, coin in enumerate(coins_all):
        if mom.n[i, i] < min_overlap:
            exclusions.append(Exclusion(coin, None, INSUFFICIENT_OVERLAP))
        elif mom.m2[i, i] == 0 or mom.am2[i, i] == 0:
            exclusions.append(Exclusion(coin, None, ZERO_VARIANCE))
        elif abs(r_ia[i, i]) >= 1 - DEGENERATE_TOL:
            exclusions.append(Exclusion(coin, None, DEGENERATE_ANCHOR))
        else:
            alive.append(i)

    sel = np.ix_(alive, alive)
    coins = tuple(coins_all[i] for i in alive)
    n = mom.n[sel]
    rij, ria, rja = r_ij[sel], r_ia[sel], r_ja[sel]
    bad_n = n < min_overlap
    bad_var = (mom.m2[sel] == 0) | (mom.m2[sel].T == 0) | (mom.am2[sel] == 0)
    bad_anchor = (np.abs(ria) >= 1 - DEGENERATE_TOL) | (np.abs(rja) >= 1 - DEGENERATE_TOL)
    with np.errstate(invalid="ignore", divide="ignore"):
        part = (rij - ria * rja) / (np.sqrt(1.0 - ria * ria) * np.sqrt(1.0 - rja * rja))
    bad_range = np.abs(part) > 1 + RANGE_SLACK
    bad = bad_n | bad_var | bad_anchor | bad_range
    values = _mirror_upper(np.where(bad, np.nan, np.clip(part, -1.0, 1.0)))
    np.fill_diagonal(values, 1.0)

    for i in range(len(coins)):
        for j in range(i + 1, len(coins)):
            if bad_n[i, j]:
                reason = INSUFFICIENT_OVERLAP
            elif bad_var[i, j]:
                reason = ZERO_VARIANCE
            elif bad_anchor[i, j]:
                reason = DEGENERATE_ANCHOR
            elif bad_range[i, j]:
                reason = OUT_OF_RANGE
            else:
                continue
            exclusions.append(Exclusion(coins[i], coins[j], reason))
    return CorrelationMatrix(coins, PARTIAL, values, n, anchor=anchor, exclusions=tuple(exclusions))


def summarize(values: Sequence[float], bins: int = DEFAULT_BINS,
              lo: float = -1.0, hi: float = 1.0) -> DistributionSummary:
    """Count, median, mean, population stddev and an equal-width histogram.

    Bins are half-open except the last, which also takes ``hi``.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise TooFewCoins("no coefficients to summarize")
    vals = np.clip(vals, lo, hi)
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(vals, bins=edges)
    hist = tuple((float(edges[k]), float(edges[k + 1]), int(counts[k])) for k in range(bins))
    return DistributionSummary(
        count=int(vals.size),
        median=float(np.median(vals)),
        mean=float(np.mean(vals)),
        stddev=float(np.std(vals)),
        histogram=hist,
    )


def anchor_correlations(panel: ReturnPanel, anchor: str,
                        min_overlap: int = DEFAULT_MIN_OVERLAP) -> dict[str, float]:
    """rho(i, anchor) for every other coin that has one."""
    if anchor not in panel.coins:
        raise AnchorMissing(f"anchor {anchor!r} is not in the panel")
    a_row = panel.row(anchor)
    out = {}
    for coin, row in zip(panel.coins, panel.values):
        if coin == anchor:
            continue
        try:
            out[coin] = pearson(row, a_row, min_overlap)
        except (InsufficientOverlap, ZeroVariance):
            continue
    return out


def anchor_distribution(panel: ReturnPanel, anchor: str, bins: int = DEFAULT_BINS,
                        min_overlap: int = DEFAULT_MIN_OVERLAP) -> DistributionSummary:
    """Distribution of every coin's correlation with the anchor."""
    if anchor not in panel.coins:
        raise AnchorMissing(f"anchor {anchor!r} is not in the panel")
    if len(panel.coins) < 2:
        raise TooFewCoins("need the anchor and at least one other coin")
    return summarize(list(anchor_correlations(panel, anchor, min_overlap).values()), bins)


def offdiagonal_distribution(matrix: CorrelationMatrix, bins: int = DEFAULT_BINS) -> DistributionSummary:
    if len(matrix.coins) < 2:
        raise TooFewCoins(f"need at least 2 coins, matrix has {len(matrix.coins)}")
    return summarize(matrix.upper_triangle(), bins)
