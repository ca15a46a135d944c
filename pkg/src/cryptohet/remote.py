"""Rate-limited JSON fetcher for CoinGecko/CoinMarketCap-style endpoints.

Raw response bodies are cached on disk keyed by URL, so a rerun with the same
cache directory issues no requests and yields the same :class:`Dataset`.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
import os
import time
from pathlib import Path
from typing import Callable, Sequence

import requests

from .config import EndpointDescriptor
from .errors import CryptohetError, NetworkError, SchemaMismatch
from .indicators import COUNT_INDICATORS, MarketSnapshot
from .ingestion import Dataset, Provenance
from .timeseries import PriceSeries, validate_prices

log = logging.getLogger(__name__)

_RETRY_STATUS = {429, 500, 502, 503, 504}


class RateLimiter:
    """Spaces calls at least ``1 / rate`` seconds apart."""

    def __init__(self, rate: float, clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        if rate <= 0:
            raise ValueError("rate limit must be positive")
        self.interval = 1.0 / rate
        self._clock = clock
        self._sleep = sleep
        self._next = None

    def wait(self) -> None:
        now = self._clock()
        if self._next is not None and now < self._next:
            self._sleep(self._next - now)
            now = self._next
        self._next = now + self.interval


def _lookup(obj, path: str):
    """Follow a dotted path; a missing key is a schema error, an explicit null is not."""
    cur = obj
    for part in path.split("."):
        if not isinstance(cur, dict) or part not in cur:
            raise SchemaMismatch(f"response has no field {path!r} (missing {part!r})")
        cur = cur[part]
    return cur


class Fetcher:
    def __init__(self, descriptor: EndpointDescriptor, rate_limit: float = 1.0,
                 cache_dir: str | Path | None = None, max_retries: int = 3,
                 backoff: float = 0.5, session: requests.Session | None = None,
                 sleep: Callable[[float], None] = time.sleep):
        self.desc = descriptor
        self.limiter = RateLimiter(rate_limit, sleep=sleep)
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        self.max_retries = max_retries
        self.backoff = backoff
        self.session = session or requests.Session()
        self._sleep = sleep
        self.requests_sent = 0
        self.headers = {"Accept": "application/json"}
        if descriptor.api_key_env and descriptor.api_key_header:
            key = os.environ.get(descriptor.api_key_env)
            if key:
                self.headers[descriptor.api_key_header] = key

    def _cache_path(self, url: str) -> Path | None:
        if self.cache_dir is None:
            return None
        digest = hashlib.sha256(url.encode()).hexdigest()[:24]
        return self.cache_dir / f"{self.desc.name}-{digest}.json"

    def _request(self, url: str) -> str:
        for attempt in range(self.max_retries + 1):
            self.limiter.wait()
            self.requests_sent += 1
            try:
                resp = self.session.get(url, headers=self.headers, timeout=self.desc.timeout)
            except requests.RequestException as exc:
                err = f"{type(exc).__name__}: {exc}"
            else:
                if resp.status_code == 200:
                    return resp.text
                err = f"HTTP {resp.status_code}"
                if resp.status_code not in _RETRY_STATUS:
                    raise NetworkError(f"{url}: {err}")
            if attempt < self.max_retries:
                delay = self.backoff * 2 ** attempt
                log.warning("%s: %s, retrying in %.2fs", url, err, delay)
                self._sleep(delay)
        raise NetworkError(f"{url}: {err} after {self.max_retries + 1} attempts")

    def get_json(self, url: str):
        cached = self._cache_path(url)
        if cached is not None and cached.exists():
            text = cached.read_text(encoding="utf-8")
        else:
            text = self._request(url)
            if cached is not None:
                cached.parent.mkdir(parents=True, exist_ok=True)
                cached.write_text(text, encoding="utf-8")
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"{url}: body is not JSON ({exc.msg})") from exc

    def url(self, template: str, **kw) -> str:
        return self.desc.base_url + template.format(**kw)


def _day_bounds(start: dt.date, end: dt.date) -> tuple[int, int]:
    t0 = dt.datetime(start.year, start.month, start.day, tzinfo=dt.timezone.utc)
    t1 = dt.datetime(end.year, end.month, end.day, tzinfo=dt.timezone.utc) + dt.timedelta(days=1)
    return int(t0.timestamp()), int(t1.timestamp()) - 1


def prices_from_points(coin: str, points, start: dt.date, end: dt.date) -> PriceSeries:
    """Daily closes from ``[[unix_ms, price], ...]``: the last point of each UTC day."""
    if not isinstance(points, list):
        raise SchemaMismatch(f"{coin}: price points must be a list")
    latest: dict[dt.date, tuple[float, float]] = {}
    for p in points:
        if not isinstance(p, (list, tuple)) or len(p) < 2:
            raise SchemaMismatch(f"{coin}: price point {p!r} is not [timestamp_ms, price]")
        ts, price = float(p[0]), p[1]
        if price is None:
            continue
        day = dt.datetime.fromtimestamp(ts / 1000.0, tz=dt.timezone.utc).date()
        if start <= day <= end and (day not in latest or ts >= latest[day][0]):
            latest[day] = (ts, float(price))
    return validate_prices(coin, [(d, latest[d][1]) for d in sorted(latest)])


def snapshot_from_record(coin: str, as_of: dt.date, record, fields: dict[str, str]) -> MarketSnapshot:
    values = {}
    for name, path in fields.items():
        v = _lookup(record, path)
        if v is not None:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise SchemaMismatch(f"{coin}: field {path!r} is not numeric: {v!r}")
            v = int(v) if name in COUNT_INDICATORS else float(v)
        values[name] = v
    return MarketSnapshot(coin, as_of, **values)


def fetch_remote(descriptor: EndpointDescriptor, coins: Sequence[str], start: dt.date, end: dt.date,
                 rate_limit: float = 1.0, cache_dir: str | Path | None = None,
                 snapshot_date: dt.date | None = None, max_retries: int = 3,
                 backoff: float = 0.5, fetcher: Fetcher | None = None) -> Dataset:
    """Fetch daily prices (and optionally one snapshot day) for ``coins``.

    The result is keyed by coin id, so it does not depend on response order.
    """
    if end < start:
        raise ValueError(f"end {end} precedes start {start}")
    f = fetcher or Fetcher(descriptor, rate_limit, cache_dir, max_retries, backoff)
    start_ts, end_ts = _day_bounds(start, end)
    prices: dict[str, PriceSeries] = {}
    snapshot: dict[str, MarketSnapshot] = {}
    for coin in sorted(set(coins)):
        url = f.url(descriptor.prices_path, coin=coin, start=start.isoformat(), end=end.isoformat(),
                    start_ts=start_ts, end_ts=end_ts)
        body = f.get_json(url)
        try:
            prices[coin] = prices_from_points(coin, _lookup(body, descriptor.prices_field), start, end)
        except SchemaMismatch:
            raise
        except CryptohetError as exc:
            raise type(exc)(f"{url}: {exc}") from exc
        if snapshot_date is not None and descriptor.snapshot_path:
            surl = f.url(descriptor.snapshot_path, coin=coin, date=snapshot_date.isoformat(),
                         date_dmy=snapshot_date.strftime("%d-%m-%Y"))
            snapshot[coin] = snapshot_from_record(coin, snapshot_date, f.get_json(surl),
                                                  descriptor.snapshot_fields)
    retrieved = dt.datetime.now(dt.timezone.utc).replace(microsecond=0).isoformat()
    return Dataset(prices, snapshot, Provenance(f"{descriptor.name} {descriptor.base_url}", retrieved))
