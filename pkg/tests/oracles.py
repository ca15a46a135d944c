"""Slow, direct reference computations used to check the library.

Nothing in here imports ``cryptohet``. Each oracle follows the textbook
definition as literally as possible (plain loops, ``math.fsum``) so that it
shares no code path with the vectorised implementation it checks.
"""

import math

import numpy as np


def log_return_oracle(closes):
    return [math.log(closes[k + 1] / closes[k]) for k in range(len(closes) - 1)]


def pearson_oracle(x, y):
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    cov = math.fsum((a - mx) * (b - my) for a, b in zip(x, y)) / (n - 1)
    sx = math.sqrt(math.fsum((a - mx) ** 2 for a in x) / (n - 1))
    sy = math.sqrt(math.fsum((b - my) ** 2 for b in y) / (n - 1))
    return cov / (sx * sy)


def residual_partial_oracle(x, y, anchor):
    """Correlation of OLS residuals of x and y regressed on [1, anchor]."""
    a = np.asarray(anchor, dtype=float)
    design = np.column_stack([np.ones_like(a), a])
    rx = np.asarray(x, dtype=float) - design @ np.linalg.lstsq(design, np.asarray(x, float), rcond=None)[0]
    ry = np.asarray(y, dtype=float) - design @ np.linalg.lstsq(design, np.asarray(y, float), rcond=None)[0]
    return pearson_oracle(list(rx), list(ry))


def hhi_oracle(values):
    total = 0.0
    squares = 0.0
    for v in values:
        total += v
        squares += v * v
    return squares / (total * total)


def gini_mad_oracle(values):
    """Mean absolute difference form: sum_ij |xi - xj| / (2 n^2 mean)."""
    n = len(values)
    mean = math.fsum(values) / n
    diff = math.fsum(abs(a - b) for a in values for b in values)
    return diff / (2 * n * n * mean)


def moments_oracle(values):
    """Population mean, stddev and skewness."""
    n = len(values)
    mean = math.fsum(values) / n
    m2 = math.fsum((v - mean) ** 2 for v in values) / n
    m3 = math.fsum((v - mean) ** 3 for v in values) / n
    skew = 0.0 if m2 == 0 else m3 / m2 ** 1.5
    return mean, math.sqrt(m2), skew


def median_oracle(values):
    s = sorted(values)
    n = len(s)
    if n % 2:
        return s[n // 2]
    return (s[n // 2 - 1] + s[n // 2]) / 2


def histogram_oracle(values, lo, hi, bins):
    """Equal-width bins; every bin half-open except the last, which is closed."""
    width = (hi - lo) / bins
    edges = [lo + k * width for k in range(bins)] + [hi]
    counts = [0] * bins
    for v in values:
        for k in range(bins):
            last = k == bins - 1
            if edges[k] <= v and (v < edges[k + 1] or (last and v <= edges[k + 1])):
                counts[k] += 1
                break
    return edges, counts
