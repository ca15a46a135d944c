"""Write tests/golden/ from the bundled fixtures using only tests/oracles.py.

The golden pipeline mirrors the CLI run in tests/test_cli.py:

    returns --align union-with-missing  ->  corr --partial-anchor bitcoin  ->
    concentration (all indicators)  ->  xcorr raw + log10  ->  dist market_cap

It never imports cryptohet; file layouts are reproduced by hand here.

    python scripts/make_golden.py
"""

import csv
import datetime as dt
import json
import math
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracles import (  # noqa: E402
    gini_mad_oracle,
    hhi_oracle,
    histogram_oracle,
    log_return_oracle,
    median_oracle,
    moments_oracle,
    pearson_oracle,
    residual_partial_oracle,
)

DATA = ROOT / "tests" / "data"
GOLDEN = ROOT / "tests" / "golden"
ANCHOR = "bitcoin"
CORR_BINS = 50
DIST_BINS = 20
MIN_OVERLAP = 3

FIELDS = {
    "market_cap": "market_cap_usd",
    "price": "price_usd",
    "volume_24h": "volume_24h_usd",
    "reddit_subscribers": "reddit_subscribers",
    "facebook_likes": "facebook_likes",
    "twitter_followers": "twitter_followers",
    "chain_tx_24h": "chain_tx_24h",
    "mining_difficulty": "mining_difficulty",
}
XCORR_INDICATORS = ["volume_24h", "chain_tx_24h", "mining_difficulty",
                    "reddit_subscribers", "facebook_likes", "twitter_followers"]


def fmt(x):
    s = np.format_float_positional(float(x), precision=12, unique=False, fractional=False, trim="-")
    return "0" if s == "-0" else s


def r12(x):
    return None if x is None else float(fmt(x))


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_json(path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def summary(values, kind, anchor=None):
    edges, counts = histogram_oracle(values, -1.0, 1.0, CORR_BINS)
    mean, sd, _ = moments_oracle(values)
    out = {
        "kind": kind,
        "count": len(values),
        "median": r12(median_oracle(values)),
        "mean": r12(mean),
        "stddev": r12(sd),
        "histogram": [{"lower": r12(edges[k]), "upper": r12(edges[k + 1]), "count": counts[k]}
                      for k in range(CORR_BINS)],
    }
    if anchor is not None:
        out["anchor"] = anchor
    return out


def returns_stage():
    by_coin = {}
    with open(DATA / "fixture_prices.csv") as fh:
        for row in csv.DictReader(fh):
            by_coin.setdefault(row["coin_id"], []).append(
                (dt.date.fromisoformat(row["date"]), float(row["close_usd"])))
    returns = {}
    for coin, pts in by_coin.items():
        pts.sort()
        rets = log_return_oracle([c for _, c in pts])
        returns[coin] = {pts[k + 1][0]: rets[k] for k in range(len(rets))}
    coins = sorted(returns)
    dates = sorted(set().union(*[set(r) for r in returns.values()]))
    write_csv(GOLDEN / "returns_panel.csv", ["coin_id"] + [d.isoformat() for d in dates],
              [[c] + [fmt(returns[c][d]) if d in returns[c] else "" for d in dates] for c in coins])
    return coins, dates, returns


def square(path, coins, cell):
    write_csv(path, ["coin_id"] + coins, [[a] + [cell(a, b) for b in coins] for a in coins])


def corr_stage(coins, dates, returns):
    def common(*cs):
        return [d for d in dates if all(d in returns[c] for c in cs)]

    pear = {}
    for a in coins:
        for b in coins:
            if a < b:
                ds = common(a, b)
                pear[a, b] = pear[b, a] = (pearson_oracle([returns[a][d] for d in ds],
                                                          [returns[b][d] for d in ds]), len(ds))
    square(GOLDEN / "pearson_matrix.csv", coins, lambda a, b: "1" if a == b else fmt(pear[a, b][0]))
    square(GOLDEN / "pearson_support.csv", coins,
           lambda a, b: str(len(returns[a]) if a == b else pear[a, b][1]))
    write_csv(GOLDEN / "pearson_exclusions.csv", ["coin_a", "coin_b", "reason"], [])
    upper = [pear[a, b][0] for i, a in enumerate(coins) for b in coins[i + 1:]]
    write_json(GOLDEN / "pearson_distribution.json", summary(upper, "pearson"))

    others = [c for c in coins if c != ANCHOR]
    write_json(GOLDEN / "anchor_distribution.json",
               summary([pear[c, ANCHOR][0] for c in others], "anchor", ANCHOR))

    part = {}
    for a in others:
        for b in others:
            if a < b:
                ds = common(a, b, ANCHOR)
                part[a, b] = part[b, a] = (residual_partial_oracle(
                    [returns[a][d] for d in ds], [returns[b][d] for d in ds],
                    [returns[ANCHOR][d] for d in ds]), len(ds))
    square(GOLDEN / "partial_matrix.csv", others, lambda a, b: "1" if a == b else fmt(part[a, b][0]))
    square(GOLDEN / "partial_support.csv", others,
           lambda a, b: str(len(common(a, ANCHOR)) if a == b else part[a, b][1]))
    write_csv(GOLDEN / "partial_exclusions.csv", ["coin_a", "coin_b", "reason"], [])
    upper = [part[a, b][0] for i, a in enumerate(others) for b in others[i + 1:]]
    write_json(GOLDEN / "partial_distribution.json", summary(upper, "partial", ANCHOR))


def load_snapshot():
    with open(DATA / "fixture_snapshot.csv") as fh:
        rows = list(csv.DictReader(fh))
    return [{k: (float(row[col]) if row[col] != "" else None) for k, col in FIELDS.items()}
            for row in rows]


def hhi_class(scaled):
    if scaled < 1500:
        return "competitive"
    if scaled <= 2500:
        return "moderately-concentrated"
    return "highly-concentrated"


def concentration_stage(snaps):
    rows, results = [], []
    for ind in FIELDS:
        vals = [s[ind] for s in snaps if s[ind] is not None]
        raw = hhi_oracle(vals)
        g = gini_mad_oracle(vals)
        res = {"indicator": ind, "n": len(vals), "skipped": len(snaps) - len(vals),
               "hhi_raw": r12(raw), "hhi_scaled": r12(raw * 10000), "gini": r12(g),
               "hhi_class": hhi_class(raw * 10000), "disparity_flag": g >= 0.5}
        results.append(res)
        rows.append([ind, len(vals), len(snaps) - len(vals), fmt(raw), fmt(raw * 10000), fmt(g),
                     res["hhi_class"], "true" if g >= 0.5 else "false"])
    write_csv(GOLDEN / "concentration.csv",
              ["indicator", "n", "skipped", "hhi_raw", "hhi_scaled", "gini", "hhi_class", "disparity_flag"],
              rows)
    write_json(GOLDEN / "concentration.json", {"results": results})


def xcorr_stage(snaps, transform):
    rows, out = [], []
    for ind in XCORR_INDICATORS:
        cells = []
        for target in ("price", "market_cap"):
            pairs = [(s[ind], s[target]) for s in snaps if s[ind] is not None and s[target] is not None]
            dropped = 0
            if transform == "log10":
                keep = [(a, b) for a, b in pairs if a > 0 and b > 0]
                dropped = len(pairs) - len(keep)
                pairs = [(math.log10(a), math.log10(b)) for a, b in keep]
            r = None
            if len(pairs) >= MIN_OVERLAP:
                r = pearson_oracle([a for a, _ in pairs], [b for _, b in pairs])
            cells.append((r, len(pairs), dropped))
        (rp, np_, dp), (rm, nm, dm) = cells
        out.append({"indicator": ind, "r_vs_price": r12(rp), "n_price": np_, "dropped_price": dp,
                    "r_vs_market_cap": r12(rm), "n_market_cap": nm, "dropped_market_cap": dm})
        rows.append([ind, "" if rp is None else fmt(rp), np_, dp, "" if rm is None else fmt(rm), nm, dm])
    write_csv(GOLDEN / f"xcorr_{transform}.csv",
              ["indicator", "r_vs_price", "n_price", "dropped_price",
               "r_vs_market_cap", "n_market_cap", "dropped_market_cap"], rows)
    write_json(GOLDEN / f"xcorr_{transform}.json",
               {"transform": transform, "min_overlap": MIN_OVERLAP, "rows": out})


def dist_stage(snaps, ind):
    present = [s[ind] for s in snaps if s[ind] is not None]
    logs = [math.log10(v) for v in present if v > 0]
    edges, counts = histogram_oracle(logs, min(logs), max(logs), DIST_BINS)
    mean, sd, skew = moments_oracle(logs)
    write_csv(GOLDEN / f"dist_{ind}.csv", ["log10_lower", "log10_upper", "count"],
              [[fmt(edges[k]), fmt(edges[k + 1]), counts[k]] for k in range(DIST_BINS)])
    write_json(GOLDEN / f"dist_{ind}.json", {
        "indicator": ind, "included": len(logs), "excluded_nonpositive": len(present) - len(logs),
        "log_mean": r12(mean), "log_stddev": r12(sd), "log_skewness": r12(skew),
        "skewness_estimator": "population",
        "bins": [{"lower": r12(edges[k]), "upper": r12(edges[k + 1]), "count": counts[k]}
                 for k in range(DIST_BINS)],
    })


def main():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    coins, dates, returns = returns_stage()
    corr_stage(coins, dates, returns)
    snaps = load_snapshot()
    concentration_stage(snaps)
    xcorr_stage(snaps, "raw")
    xcorr_stage(snaps, "log10")
    dist_stage(snaps, "market_cap")
    dist_stage(snaps, "reddit_subscribers")


if __name__ == "__main__":
    main()
