"""INI-style configuration: CLI defaults and remote endpoint descriptors.

::

    [defaults]
    min_overlap = 3
    bins = 50
    align = intersection
    anchor = bitcoin

    [endpoint:coingecko]
    base_url = https://api.coingecko.com/api/v3
    prices_path = /coins/{coin}/market_chart/range?vs_currency=usd&from={start_ts}&to={end_ts}
    snapshot_path = /coins/{coin}/history?date={date_dmy}&localization=false
    api_key_env = COINGECKO_API_KEY
    api_key_header = x-cg-demo-api-key
    prices_field = prices
    field.market_cap = market_data.market_cap.usd
    field.price = market_data.current_price.usd

Path templates may use ``{coin}``, ``{start}``/``{end}`` (ISO days),
``{start_ts}``/``{end_ts}`` (unix seconds, end inclusive through 23:59:59)
and, for snapshots, ``{date}`` and ``{date_dmy}`` (dd-mm-yyyy).
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, UnknownIndicator
from .indicators import check_indicator

DEFAULT_KEYS = {"min_overlap", "bins", "align", "anchor", "transform", "dist_bins"}


@dataclass(frozen=True)
class EndpointDescriptor:
    name: str
    base_url: str
    prices_path: str
    snapshot_path: str | None = None
    prices_field: str = "prices"
    snapshot_fields: dict[str, str] = field(default_factory=dict)
    api_key_env: str | None = None
    api_key_header: str | None = None
    timeout: float = 30.0


@dataclass
class Config:
    defaults: dict[str, str] = field(default_factory=dict)
    endpoints: dict[str, EndpointDescriptor] = field(default_factory=dict)


def _endpoint(name: str, sec: configparser.SectionProxy) -> EndpointDescriptor:
    for key in ("base_url", "prices_path"):
        if key not in sec:
            raise ConfigError(f"[endpoint:{name}] is missing {key}")
    fields = {}
    for key, value in sec.items():
        if key.startswith("field."):
            ind = key[len("field."):]
            try:
                check_indicator(ind)
            except UnknownIndicator as exc:
                raise ConfigError(f"[endpoint:{name}] {key}: {exc}") from exc
            fields[ind] = value
    try:
        timeout = sec.getfloat("timeout", 30.0)
    except ValueError as exc:
        raise ConfigError(f"[endpoint:{name}] timeout: {exc}") from exc
    return EndpointDescriptor(
        name=name,
        base_url=sec["base_url"].rstrip("/"),
        prices_path=sec["prices_path"],
        snapshot_path=sec.get("snapshot_path"),
        prices_field=sec.get("prices_field", "prices"),
        snapshot_fields=fields,
        api_key_env=sec.get("api_key_env"),
        api_key_header=sec.get("api_key_header"),
        timeout=timeout,
    )


def load_config(path: str | Path) -> Config:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    cfg = Config()
    for name in parser.sections():
        sec = parser[name]
        if name == "defaults":
            unknown = set(sec) - DEFAULT_KEYS
            if unknown:
                raise ConfigError(f"[defaults] unknown keys: {', '.join(sorted(unknown))}")
            cfg.defaults = dict(sec)
        elif name.startswith("endpoint:"):
            ep = name.split(":", 1)[1]
            cfg.endpoints[ep] = _endpoint(ep, sec)
        else:
            raise ConfigError(f"unknown section [{name}]")
    return cfg
