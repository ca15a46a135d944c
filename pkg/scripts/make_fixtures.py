"""Regenerate the bundled 50-coin fixtures under tests/data/.

Self-contained on purpose: it does not import cryptohet, so the fixtures and
the golden files derived from them do not depend on the code under test.

    python scripts/make_fixtures.py
"""

import csv
import datetime as dt
from pathlib import Path

import numpy as np

DATA = Path(__file__).resolve().parents[1] / "tests" / "data"
SEED = 20181216
N_COINS = 50
N_DAYS = 120
START = dt.date(2018, 1, 1)


def _sig(x, digits=8):
    return float(f"{x:.{digits}g}")


def make_prices(rng):
    coins = ["bitcoin"] + [f"coin{k:02d}" for k in range(1, N_COINS)]
    anchor = rng.normal(0.0, 0.04, N_DAYS - 1)
    rows = []
    for idx, coin in enumerate(coins):
        if coin == "bitcoin":
            rets = anchor
        else:
            beta = rng.uniform(0.3, 1.5)
            rets = beta * anchor + rng.normal(0.0, 0.03, N_DAYS - 1)
        log_p = np.concatenate([[0.0], np.cumsum(rets)]) + rng.normal(0.0, 3.0)
        prices = np.exp(log_p)
        days = list(range(N_DAYS))
        # late listings and a delisting gap so alignment has something to do
        if idx % 7 == 3:
            days = days[10 + idx:]
        if idx % 11 == 5:
            days = days[:40] + days[47:]
        for d in days:
            rows.append((coin, START + dt.timedelta(days=d), _sig(prices[d])))
    rows.sort()
    with open(DATA / "fixture_prices.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "coin_id", "close_usd"])
        for coin, day, close in rows:
            w.writerow([day.isoformat(), coin, repr(close)])


SNAPSHOT_COLUMNS = [
    "coin_id", "as_of", "market_cap_usd", "price_usd", "volume_24h_usd",
    "reddit_subscribers", "facebook_likes", "twitter_followers",
    "chain_tx_24h", "mining_difficulty",
]


def make_snapshot(rng):
    as_of = dt.date(2018, 12, 16).isoformat()
    coins = ["bitcoin"] + [f"coin{k:02d}" for k in range(1, N_COINS)]
    mcap = np.exp(rng.normal(17.0, 2.5, N_COINS))
    mcap[0] = mcap.max() * 6.0
    price = np.exp(rng.normal(-1.0, 2.5, N_COINS))
    price[0] = 3200.0
    volume = mcap * np.exp(rng.normal(-3.0, 1.0, N_COINS))
    reddit = np.round(np.exp(0.8 * np.log(mcap) - 6.0 + rng.normal(0, 0.8, N_COINS)))
    facebook = np.round(np.exp(rng.normal(6.0, 2.0, N_COINS)))
    twitter = np.round(np.exp(rng.normal(9.0, 1.5, N_COINS)))
    chain_tx = np.round(np.exp(rng.normal(7.0, 2.0, N_COINS)))
    difficulty = np.exp(rng.normal(10.0, 6.0, N_COINS))
    has_chain = rng.random(N_COINS) < 0.4
    has_chain[0] = True
    rows = []
    for i, coin in enumerate(coins):
        row = [coin, as_of, repr(_sig(mcap[i])), repr(_sig(price[i])), repr(_sig(volume[i])),
               str(int(reddit[i])), str(int(facebook[i])), str(int(twitter[i])), "", ""]
        if has_chain[i]:
            row[8] = str(int(chain_tx[i]))
            row[9] = repr(_sig(difficulty[i]))
        if i % 9 == 4:
            row[6] = ""  # no Facebook page
        if i % 13 == 6:
            row[5] = "0"  # empty subreddit
        if i % 17 == 8:
            row[7] = ""
        if i == 23:
            row[4] = repr(0.0)  # no trades that day
        rows.append(row)
    with open(DATA / "fixture_snapshot.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SNAPSHOT_COLUMNS)
        w.writerows(rows)


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    make_prices(rng)
    make_snapshot(rng)


if __name__ == "__main__":
    main()
