"""Price-CSV, snapshot-CSV and JSON dataset reading and writing.

Price CSV::

    date,coin_id,close_usd
    2018-01-01,bitcoin,13657.2

Snapshot CSV (empty cell = not reported, never zero)::

    coin_id,as_of,market_cap_usd,price_usd,volume_24h_usd,reddit_subscribers,
    facebook_likes,twitter_followers,chain_tx_24h,mining_difficulty

Numbers use ``.`` as the decimal separator; scientific notation is fine,
thousands separators are not. Writers emit the canonical form (rows sorted by
coin then date, floats as their shortest round-trip repr), so a canonical
file survives load -> save byte for byte.

Loading never drops a row silently. Rows that cannot be parsed at all raise
:class:`MalformedRow` with the line number. Rows that parse but break a
series or snapshot invariant reject that coin and are reported as
:class:`LoadIssue` entries; every other coin still loads.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import (
    CryptohetError,
    DuplicateCoin,
    FileUnreadable,
    InvalidDate,
    MalformedRow,
    SchemaMismatch,
)
from .indicators import COUNT_INDICATORS, INDICATORS, MarketSnapshot
from .report import dumps_csv, fmt
from .timeseries import PriceSeries, ReturnPanel, parse_day, validate_prices

PRICE_HEADER = ("date", "coin_id", "close_usd")
SNAPSHOT_COLUMNS = {
    "market_cap": "market_cap_usd",
    "price": "price_usd",
    "volume_24h": "volume_24h_usd",
    "reddit_subscribers": "reddit_subscribers",
    "facebook_likes": "facebook_likes",
    "twitter_followers": "twitter_followers",
    "chain_tx_24h": "chain_tx_24h",
    "mining_difficulty": "mining_difficulty",
}
SNAPSHOT_HEADER = ("coin_id", "as_of") + tuple(SNAPSHOT_COLUMNS[k] for k in INDICATORS)

_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class LoadIssue:
    line: int | None
    coin: str
    kind: str
    message: str

    def __str__(self):
        where = f"line {self.line}" if self.line is not None else "file"
        return f"{where}: {self.coin}: {self.kind}: {self.message}"


@dataclass
class PriceLoad:
    series: dict[str, PriceSeries]
    issues: list[LoadIssue] = field(default_factory=list)


@dataclass
class SnapshotLoad:
    snapshots: dict[str, MarketSnapshot]
    issues: list[LoadIssue] = field(default_factory=list)


@dataclass(frozen=True)
class Provenance:
    source: str
    retrieved_at: str


@dataclass
class Dataset:
    prices: dict[str, PriceSeries] = field(default_factory=dict)
    snapshot: dict[str, MarketSnapshot] = field(default_factory=dict)
    provenance: Provenance | None = None


def parse_number(text: str) -> float:
    text = text.strip()
    if not _NUMBER.match(text):
        raise ValueError(f"not a plain decimal number: {text!r}")
    return float(text)


def format_number(value: float | int) -> str:
    """Exact text form used by the writers (round-trips through parse_number)."""
    if isinstance(value, int):
        return str(value)
    if not math.isfinite(value):
        raise ValueError(f"cannot write non-finite value {value!r}")
    return repr(float(value))


def _read_rows(path: str | Path, header: tuple[str, ...]):
    """Yield (line_number, row_dict); the header is line 1."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(f"{path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            first = next(reader, None)
            if first is None:
                raise MalformedRow("empty file, header required", 1)
            cols = [c.strip() for c in first]
            if sorted(cols) != sorted(header):
                raise MalformedRow(f"header must contain exactly {','.join(header)}", 1)
            for row in reader:
                line = reader.line_num
                if not row or (len(row) == 1 and not row[0].strip()):
                    raise MalformedRow("blank row", line)
                if len(row) != len(cols):
                    raise MalformedRow(f"expected {len(cols)} fields, got {len(row)}", line)
                yield line, dict(zip(cols, (v.strip() for v in row)))
        except UnicodeDecodeError as exc:
            raise FileUnreadable(f"{path}: not UTF-8 text") from exc
        except csv.Error as exc:
            raise MalformedRow(str(exc), reader.line_num) from exc


def load_prices(path: str | Path) -> PriceLoad:
    grouped: dict[str, list[tuple[int, dt.date, float]]] = {}
    for line, row in _read_rows(path, PRICE_HEADER):
        coin = row["coin_id"]
        if not coin:
            raise MalformedRow("empty coin_id", line)
        try:
            day = parse_day(row["date"])
        except InvalidDate as exc:
            raise MalformedRow(str(exc), line) from exc
        try:
            close = parse_number(row["close_usd"])
        except ValueError as exc:
            raise MalformedRow(str(exc), line) from exc
        grouped.setdefault(coin, []).append((line, day, close))

    out: dict[str, PriceSeries] = {}
    issues: list[LoadIssue] = []
    for coin in sorted(grouped):
        rows = sorted(grouped[coin], key=lambda r: (r[1], r[0]))
        bad = [LoadIssue(line, coin, "NonPositivePrice", f"close {close!r} must be > 0")
               for line, _, close in rows if close <= 0]
        for prev, cur in zip(rows, rows[1:]):
            if prev[1] == cur[1]:
                bad.append(LoadIssue(cur[0], coin, "DuplicateDate",
                                     f"{cur[1]} already given on line {prev[0]}"))
        if not bad:
            try:
                out[coin] = validate_prices(coin, [(d, c) for _, d, c in rows])
            except CryptohetError as exc:
                bad.append(LoadIssue(rows[0][0], coin, type(exc).__name__, str(exc)))
        if bad:
            issues.extend(sorted(bad, key=lambda i: i.line))
    return PriceLoad(out, issues)


def save_prices(series: Mapping[str, PriceSeries], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PRICE_HEADER)
        for coin in sorted(series):
            s = series[coin]
            for day, close in zip(s.dates, s.closes):
                w.writerow([day.isoformat(), coin, format_number(close)])


def _snapshot_value(name: str, text: str, line: int):
    if text == "":
        return None
    try:
        v = parse_number(text)
    except ValueError as exc:
        raise MalformedRow(f"{SNAPSHOT_COLUMNS[name]}: {exc}", line) from exc
    if name in COUNT_INDICATORS:
        if v != int(v):
            raise MalformedRow(f"{SNAPSHOT_COLUMNS[name]} must be a whole count, got {text!r}", line)
        return int(v)
    return v


def load_snapshot(path: str | Path) -> SnapshotLoad:
    out: dict[str, MarketSnapshot] = {}
    issues: list[LoadIssue] = []
    seen: dict[str, int] = {}
    for line, row in _read_rows(path, SNAPSHOT_HEADER):
        coin = row["coin_id"]
        if not coin:
            raise MalformedRow("empty coin_id", line)
        if coin in seen:
            raise DuplicateCoin(f"coin {coin!r} on line {line} already given on line {seen[coin]}")
        seen[coin] = line
        try:
            as_of = parse_day(row["as_of"])
        except InvalidDate as exc:
            raise MalformedRow(str(exc), line) from exc
        values = {name: _snapshot_value(name, row[col], line) for name, col in SNAPSHOT_COLUMNS.items()}
        try:
            out[coin] = MarketSnapshot(coin, as_of, **values)
        except CryptohetError as exc:
            issues.append(LoadIssue(line, coin, type(exc).__name__, str(exc)))
    return SnapshotLoad(dict(sorted(out.items())), issues)


def save_snapshot(snapshots: Mapping[str, MarketSnapshot], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SNAPSHOT_HEADER)
        for coin in sorted(snapshots):
            s = snapshots[coin]
            row = [coin, s.as_of.isoformat()]
            for name in INDICATORS:
                v = getattr(s, name)
                row.append("" if v is None else format_number(v))
            w.writerow(row)


def dataset_to_json(ds: Dataset) -> dict:
    return {
        "provenance": None if ds.provenance is None else
        {"source": ds.provenance.source, "retrieved_at": ds.provenance.retrieved_at},
        "prices": {
            coin: [[d.isoformat(), c] for d, c in zip(s.dates, s.closes)]
            for coin, s in sorted(ds.prices.items())
        },
        "snapshot": {
            coin: {"as_of": s.as_of.isoformat(), **{k: getattr(s, k) for k in INDICATORS}}
            for coin, s in sorted(ds.snapshot.items())
        },
    }


def dataset_from_json(obj: dict) -> Dataset:
    try:
        prov = obj.get("provenance")
        prices = {
            coin: validate_prices(coin, [(d, float(c)) for d, c in pts])
            for coin, pts in obj["prices"].items()
        }
        snapshot = {}
        for coin, rec in obj["snapshot"].items():
            vals = {k: rec.get(k) for k in INDICATORS}
            for k in INDICATORS:
                if vals[k] is not None:
                    vals[k] = int(vals[k]) if k in COUNT_INDICATORS else float(vals[k])
            snapshot[coin] = MarketSnapshot(coin, parse_day(rec["as_of"]), **vals)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaMismatch(f"dataset JSON: {exc!r}") from exc
    return Dataset(prices, snapshot,
                   None if prov is None else Provenance(prov["source"], prov["retrieved_at"]))


def save_dataset(ds: Dataset, path: str | Path) -> None:
    Path(path).write_text(json.dumps(dataset_to_json(ds), indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def load_dataset(path: str | Path) -> Dataset:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FileUnreadable(f"{path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: not JSON ({exc.msg})") from exc
    return dataset_from_json(obj)


def save_panel(panel: ReturnPanel, path: str | Path) -> None:
    """Coins x dates CSV; empty cell = missing, values at 12 significant digits."""
    rows = [[coin] + ["" if np.isnan(v) else fmt(v) for v in row]
            for coin, row in zip(panel.coins, panel.values)]
    Path(path).write_text(dumps_csv(["coin_id"] + [d.isoformat() for d in panel.dates], rows),
                          encoding="utf-8", newline="")


def load_panel(path: str | Path) -> ReturnPanel:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(f"{path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "coin_id":
            raise MalformedRow("panel header must start with coin_id", 1)
        try:
            dates = tuple(parse_day(d) for d in header[1:])
        except InvalidDate as exc:
            raise MalformedRow(str(exc), 1) from exc
        coins, values = [], []
        for row in reader:
            line = reader.line_num
            if len(row) != len(header):
                raise MalformedRow(f"expected {len(header)} fields, got {len(row)}", line)
            try:
                values.append([np.nan if v == "" else parse_number(v) for v in row[1:]])
            except ValueError as exc:
                raise MalformedRow(str(exc), line) from exc
            coins.append(row[0])
    if not coins:
        raise MalformedRow("panel has no rows", 2)
    return ReturnPanel(tuple(coins), dates, np.array(values, dtype=float).reshape(len(coins), len(dates)))
