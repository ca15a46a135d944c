"""Command-line front end.

Every subcommand writes into ``--output-dir`` and finishes with a
``<command>.run.json`` record and a ``<command>.manifest.json`` listing the
files it wrote. On failure the exit code is the error's ``exit_code`` and one
JSON line ``{"error": ..., "exit_code": ..., "message": ...}`` goes to stderr.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .concentration import concentration_report
from .config import Config, load_config
from .correlation import (
    DEFAULT_BINS,
    DEFAULT_MIN_OVERLAP,
    CorrelationMatrix,
    DistributionSummary,
    anchor_distribution,
    offdiagonal_distribution,
    partial_matrix,
    pearson_matrix,
)
from .errors import ConfigError, CryptohetError, InvalidParameter
from .indicators import (
    INDICATORS,
    LOG10,
    MARKET_INDICATORS,
    RAW,
    XCORR_INDICATORS,
    cross_correlation,
    log_histogram,
)
from .ingestion import (
    load_panel,
    load_prices,
    load_snapshot,
    save_dataset,
    save_panel,
    save_prices,
    save_snapshot,
)
from .report import ReportWriter
from .simulate import SimulationConfig, simulate_prices
from .timeseries import ALIGN_POLICIES, INTERSECTION, align_returns, log_returns

log = logging.getLogger("cryptohet")

BUILTIN_DEFAULTS = {
    "min_overlap": str(DEFAULT_MIN_OVERLAP),
    "bins": str(DEFAULT_BINS),
    "dist_bins": "20",
    "align": INTERSECTION,
    "transform": RAW,
    "anchor": "",
}


class _Settings:
    """CLI flag, else [defaults] from --config, else the built-in value."""

    def __init__(self, args: argparse.Namespace, cfg: Config | None):
        self.args = args
        self.cfg = cfg
        self.defaults = dict(BUILTIN_DEFAULTS)
        if cfg is not None:
            self.defaults.update(cfg.defaults)

    def get(self, name: str, attr: str | None = None):
        v = getattr(self.args, attr or name, None)
        return self.defaults.get(name) if v is None else v

    def int(self, name: str, attr: str | None = None) -> int:
        v = self.get(name, attr)
        try:
            return int(v)
        except (TypeError, ValueError) as exc:
            raise InvalidParameter(f"{name} must be an integer, got {v!r}") from exc


def _split(values: Sequence[str] | None) -> list[str] | None:
    if values is None:
        return None
    out = []
    for v in values:
        out.extend(p for p in (s.strip() for s in v.split(",")) if p)
    return out


def _warn_issues(issues) -> list[str]:
    lines = [str(i) for i in issues]
    for line in lines:
        print(f"warning: {line}", file=sys.stderr)
    return lines


def _summary_json(s: DistributionSummary, kind: str, anchor: str | None = None) -> dict:
    out = {
        "kind": kind,
        "count": s.count,
        "median": s.median,
        "mean": s.mean,
        "stddev": s.stddev,
        "histogram": [{"lower": lo, "upper": hi, "count": c} for lo, hi, c in s.histogram],
    }
    if anchor is not None:
        out["anchor"] = anchor
    return out


def _write_matrix(w: ReportWriter, prefix: str, m: CorrelationMatrix) -> None:
    coins = list(m.coins)
    w.csv(f"{prefix}_matrix.csv", ["coin_id"] + coins,
          ([c] + list(row) for c, row in zip(coins, m.values)))
    w.csv(f"{prefix}_support.csv", ["coin_id"] + coins,
          ([c] + [int(v) for v in row] for c, row in zip(coins, m.support)))
    w.csv(f"{prefix}_exclusions.csv", ["coin_a", "coin_b", "reason"],
          ([e.coin_a, e.coin_b, e.reason] for e in m.exclusions))


def cmd_returns(args, st: _Settings) -> None:
    align = st.get("align")
    if align not in ALIGN_POLICIES:
        raise InvalidParameter(f"align must be one of {ALIGN_POLICIES}, got {align!r}")
    loaded = load_prices(args.prices)
    issues = _warn_issues(loaded.issues)
    if not loaded.series:
        raise InvalidParameter(f"{args.prices}: no valid price series")
    panel = align_returns([log_returns(s) for s in loaded.series.values()], align)
    w = ReportWriter(args.output_dir, "returns")
    w.out_dir.mkdir(parents=True, exist_ok=True)
    save_panel(panel, w.out_dir / "returns_panel.csv")
    w.register("returns_panel.csv")
    w.finish({"align": align}, [args.prices],
             {"load_issues": issues, "coins": len(panel.coins), "dates": len(panel.dates),
              "missing_cells": panel.n_missing})


def cmd_corr(args, st: _Settings) -> None:
    bins = st.int("bins")
    min_overlap = st.int("min_overlap")
    anchor = st.get("anchor", "partial_anchor") or None
    if bins < 1 or min_overlap < 2:
        raise InvalidParameter("bins must be >= 1 and min-overlap >= 2")
    panel = load_panel(args.panel)
    w = ReportWriter(args.output_dir, "corr")
    pear = pearson_matrix(panel, min_overlap)
    extra = {"pearson_exclusions": len(pear.exclusions)}
    if anchor is not None:
        # fail on a missing anchor before writing anything
        anchor_dist = anchor_distribution(panel, anchor, bins, min_overlap)
        part = partial_matrix(panel, anchor, min_overlap)
    _write_matrix(w, "pearson", pear)
    w.json("pearson_distribution.json", _summary_json(offdiagonal_distribution(pear, bins), "pearson"))
    if anchor is not None:
        w.json("anchor_distribution.json", _summary_json(anchor_dist, "anchor", anchor))
        _write_matrix(w, "partial", part)
        w.json("partial_distribution.json",
               _summary_json(offdiagonal_distribution(part, bins), "partial", anchor))
        extra["partial_exclusions"] = len(part.exclusions)
    w.finish({"partial_anchor": anchor, "bins": bins, "min_overlap": min_overlap}, [args.panel], extra)


def _load_snapshots(path):
    loaded = load_snapshot(path)
    issues = _warn_issues(loaded.issues)
    if not loaded.snapshots:
        raise InvalidParameter(f"{path}: no valid snapshot rows")
    return list(loaded.snapshots.values()), issues


def cmd_concentration(args, st: _Settings) -> None:
    indicators = _split(args.indicators) or list(MARKET_INDICATORS)
    snaps, issues = _load_snapshots(args.snapshot)
    results = concentration_report(snaps, indicators)
    cols = ["indicator", "n", "skipped", "hhi_raw", "hhi_scaled", "gini", "hhi_class", "disparity_flag"]
    w = ReportWriter(args.output_dir, "concentration")
    w.csv("concentration.csv", cols, ([getattr(r, c) for c in cols] for r in results))
    w.json("concentration.json", {"results": [{c: getattr(r, c) for c in cols} for r in results]})
    w.finish({"indicators": indicators}, [args.snapshot], {"load_issues": issues})


def cmd_xcorr(args, st: _Settings) -> None:
    transform = st.get("transform")
    transforms = [RAW, LOG10] if transform == "both" else [transform]
    if not set(transforms) <= {RAW, LOG10}:
        raise InvalidParameter(f"transform must be raw, log10 or both, got {transform!r}")
    min_overlap = st.int("min_overlap")
    indicators = _split(args.indicators) or list(XCORR_INDICATORS)
    snaps, issues = _load_snapshots(args.snapshot)
    cols = ["indicator", "r_vs_price", "n_price", "dropped_price",
            "r_vs_market_cap", "n_market_cap", "dropped_market_cap"]
    w = ReportWriter(args.output_dir, "xcorr")
    for t in transforms:
        table = cross_correlation(snaps, indicators, t, min_overlap)
        w.csv(f"xcorr_{t}.csv", cols, ([getattr(r, c) for c in cols] for r in table.rows))
        w.json(f"xcorr_{t}.json", {"transform": t, "min_overlap": table.min_overlap,
                                   "rows": [{c: getattr(r, c) for c in cols} for r in table.rows]})
    w.finish({"transform": transform, "indicators": indicators, "min_overlap": min_overlap},
             [args.snapshot], {"load_issues": issues})


def cmd_dist(args, st: _Settings) -> None:
    bins = st.int("dist_bins", "bins")
    if bins < 1:
        raise InvalidParameter("bins must be >= 1")
    snaps, issues = _load_snapshots(args.snapshot)
    h = log_histogram(snaps, args.indicator, bins)
    w = ReportWriter(args.output_dir, "dist")
    w.csv(f"dist_{h.indicator}.csv", ["log10_lower", "log10_upper", "count"], h.bins)
    w.json(f"dist_{h.indicator}.json", {
        "indicator": h.indicator,
        "included": h.included,
        "excluded_nonpositive": h.excluded_nonpositive,
        "log_mean": h.log_mean,
        "log_stddev": h.log_stddev,
        "log_skewness": h.log_skewness,
        "skewness_estimator": "population",
        "bins": [{"lower": lo, "upper": hi, "count": c} for lo, hi, c in h.bins],
    })
    w.finish({"indicator": args.indicator, "bins": bins}, [args.snapshot], {"load_issues": issues})


def cmd_simulate(args, st: _Settings) -> None:
    lo, hi = args.beta_range
    try:
        start = dt.date.fromisoformat(args.start)
    except ValueError as exc:
        raise InvalidParameter(f"--start: {exc}") from exc
    cfg = SimulationConfig(seed=args.seed, coins=args.coins, days=args.days, beta_low=lo, beta_high=hi,
                           noise=args.noise, anchor_vol=args.anchor_vol, anchor_id=args.anchor_id,
                           start=start)
    w = ReportWriter(args.output_dir, "simulate")
    w.out_dir.mkdir(parents=True, exist_ok=True)
    save_prices(simulate_prices(cfg), w.out_dir / "prices.csv")
    w.register("prices.csv")
    params = {"seed": cfg.seed, "coins": cfg.coins, "days": cfg.days, "beta_range": [lo, hi],
              "noise": cfg.noise, "anchor_vol": cfg.anchor_vol, "anchor_id": cfg.anchor_id,
              "start": cfg.start.isoformat()}
    w.finish(params)


def cmd_fetch(args, st: _Settings) -> None:
    from .remote import fetch_remote

    if st.cfg is None:
        raise ConfigError("fetch needs --config with an [endpoint:<name>] section")
    if args.endpoint not in st.cfg.endpoints:
        raise ConfigError(f"no [endpoint:{args.endpoint}] in {args.config}")
    try:
        start = dt.date.fromisoformat(args.start)
        end = dt.date.fromisoformat(args.end)
        snap_day = dt.date.fromisoformat(args.snapshot_date) if args.snapshot_date else None
    except ValueError as exc:
        raise InvalidParameter(str(exc)) from exc
    coins = _split(args.coins) or []
    ds = fetch_remote(st.cfg.endpoints[args.endpoint], coins, start, end, rate_limit=args.rate_limit,
                      cache_dir=args.cache_dir, snapshot_date=snap_day, max_retries=args.max_retries)
    w = ReportWriter(args.output_dir, "fetch")
    w.out_dir.mkdir(parents=True, exist_ok=True)
    save_dataset(ds, w.out_dir / "dataset.json")
    w.register("dataset.json")
    save_prices(ds.prices, w.out_dir / "prices.csv")
    w.register("prices.csv")
    if ds.snapshot:
        save_snapshot(ds.snapshot, w.out_dir / "snapshot.csv")
        w.register("snapshot.csv")
    w.finish({"endpoint": args.endpoint, "coins": coins, "start": args.start, "end": args.end,
              "snapshot_date": args.snapshot_date, "rate_limit": args.rate_limit})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cryptohet", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="INI file with [defaults] and [endpoint:<name>] sections")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--output-dir", "-o", required=True)
        sp.set_defaults(func=func)
        return sp

    sp = add("returns", cmd_returns, "price CSV -> aligned log-return panel")
    sp.add_argument("prices")
    sp.add_argument("--align", choices=ALIGN_POLICIES)

    sp = add("corr", cmd_corr, "Pearson / partial correlation matrices and distributions")
    sp.add_argument("panel")
    sp.add_argument("--partial-anchor", dest="partial_anchor")
    sp.add_argument("--bins", type=int)
    sp.add_argument("--min-overlap", dest="min_overlap", type=int)

    sp = add("concentration", cmd_concentration, "HHI / Gini per indicator")
    sp.add_argument("snapshot")
    sp.add_argument("--indicators", nargs="+", metavar="NAME",
                    help=f"comma or space separated; known: {', '.join(INDICATORS)}")

    sp = add("xcorr", cmd_xcorr, "indicators vs price and market cap")
    sp.add_argument("snapshot")
    sp.add_argument("--transform", choices=(RAW, LOG10, "both"))
    sp.add_argument("--indicators", nargs="+", metavar="NAME")
    sp.add_argument("--min-overlap", dest="min_overlap", type=int)

    sp = add("dist", cmd_dist, "log10 histogram of one indicator")
    sp.add_argument("snapshot")
    sp.add_argument("--indicator", required=True)
    sp.add_argument("--bins", type=int)

    sp = add("simulate", cmd_simulate, "synthetic anchored market -> price CSV")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--coins", type=int, default=50)
    sp.add_argument("--days", type=int, default=300)
    sp.add_argument("--beta-range", dest="beta_range", type=float, nargs=2, default=(0.3, 1.5),
                    metavar=("LOW", "HIGH"))
    sp.add_argument("--noise", type=float, default=0.03)
    sp.add_argument("--anchor-vol", dest="anchor_vol", type=float, default=0.04)
    sp.add_argument("--anchor-id", dest="anchor_id", default="bitcoin")
    sp.add_argument("--start", default="2018-01-01")

    sp = add("fetch", cmd_fetch, "download prices/snapshot from a configured endpoint")
    sp.add_argument("--endpoint", required=True)
    sp.add_argument("--coins", nargs="+", required=True)
    sp.add_argument("--start", required=True)
    sp.add_argument("--end", required=True)
    sp.add_argument("--snapshot-date", dest="snapshot_date")
    sp.add_argument("--rate-limit", dest="rate_limit", type=float, default=1.0)
    sp.add_argument("--cache-dir", dest="cache_dir")
    sp.add_argument("--max-retries", dest="max_retries", type=int, default=3)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else None
        args.func(args, _Settings(args, cfg))
    except CryptohetError as exc:
        _report_error(type(exc).__name__, exc.exit_code, str(exc))
        return exc.exit_code
    except ValueError as exc:
        _report_error("InvalidParameter", InvalidParameter.exit_code, str(exc))
        return InvalidParameter.exit_code
    return 0


def _report_error(kind: str, code: int, message: str) -> None:
    print(json.dumps({"error": kind, "exit_code": code, "message": message}), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
