"""Synthetic one-factor market: every coin loads on a common anchor return."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .timeseries import PriceSeries


@dataclass(frozen=True)
class SimulationConfig:
    seed: int
    coins: int = 50
    days: int = 300
    beta_low: float = 0.3
    beta_high: float = 1.5
    noise: float = 0.03
    anchor_vol: float = 0.04
    anchor_id: str = "bitcoin"
    start: dt.date = dt.date(2018, 1, 1)

    def __post_init__(self):
        if self.coins < 2:
            raise InvalidParameter("coins must be >= 2 (the anchor plus at least one other)")
        if self.days < 2:
            raise InvalidParameter("days must be >= 2")
        if not self.beta_low <= self.beta_high:
            raise InvalidParameter(f"empty beta range [{self.beta_low}, {self.beta_high}]")
        if self.noise < 0 or self.anchor_vol <= 0:
            raise InvalidParameter("noise must be >= 0 and anchor_vol > 0")
        if not self.anchor_id:
            raise InvalidParameter("anchor_id must be non-empty")


def coin_ids(cfg: SimulationConfig) -> list[str]:
    width = len(str(cfg.coins - 1))
    return [cfg.anchor_id] + [f"coin{k:0{width}d}" for k in range(1, cfg.coins)]


def simulate_returns(cfg: SimulationConfig) -> tuple[dict[str, np.ndarray], dict[str, float]]:
    """Anchor returns ~ N(0, anchor_vol); coin i gets beta_i * anchor + N(0, noise).

    Returns the per-coin return arrays (length ``days - 1``) and the betas.
    """
    rng = np.random.default_rng(cfg.seed)
    n_ret = cfg.days - 1
    anchor = rng.normal(0.0, cfg.anchor_vol, n_ret)
    ids = coin_ids(cfg)
    betas = rng.uniform(cfg.beta_low, cfg.beta_high, cfg.coins - 1)
    eps = rng.normal(0.0, 1.0, (cfg.coins - 1, n_ret)) * cfg.noise
    rets = {ids[0]: anchor}
    for k, coin in enumerate(ids[1:]):
        rets[coin] = betas[k] * anchor + eps[k]
    return rets, {coin: float(b) for coin, b in zip(ids[1:], betas)}


def simulate_prices(cfg: SimulationConfig) -> dict[str, PriceSeries]:
    """Prices start at 1.0 and follow exp(cumulative returns)."""
    rets, _ = simulate_returns(cfg)
    dates = tuple(cfg.start + dt.timedelta(days=k) for k in range(cfg.days))
    out = {}
    for coin, r in rets.items():
        closes = np.exp(np.concatenate([[0.0], np.cumsum(r)]))
        out[coin] = PriceSeries(coin, dates, tuple(float(c) for c in closes))
    return out
