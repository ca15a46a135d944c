import dataclasses
import datetime as dt

import pytest

from cryptohet.config import load_config
from cryptohet.errors import ConfigError, NetworkError, SchemaMismatch
from cryptohet.ingestion import load_prices, load_snapshot
from cryptohet.remote import Fetcher, RateLimiter, fetch_remote, prices_from_points

START, END = dt.date(2018, 1, 1), dt.date(2018, 1, 5)
SNAP_DAY = dt.date(2018, 12, 16)


@pytest.fixture
def descriptor(data_dir, recorded_server):
    ep = load_config(data_dir / "recorded_endpoint.ini").endpoints["recorded"]
    return dataclasses.replace(ep, base_url=recorded_server.base_url)


def no_sleep(_):
    pass


def fetcher(descriptor, **kw):
    kw.setdefault("rate_limit", 1000.0)
    return Fetcher(descriptor, sleep=no_sleep, **kw)


def test_recorded_fixture_equals_csv_load(descriptor, data_dir, tmp_path):
    ds = fetch_remote(descriptor, ["ethereum", "bitcoin"], START, END, snapshot_date=SNAP_DAY,
                      fetcher=fetcher(descriptor, cache_dir=tmp_path))
    assert ds.prices == load_prices(data_dir / "recorded_prices.csv").series
    assert ds.snapshot == load_snapshot(data_dir / "recorded_snapshot.csv").snapshots
    assert ds.provenance.source.startswith("recorded ")


def test_cache_makes_rerun_offline(descriptor, recorded_server, tmp_path):
    first = fetch_remote(descriptor, ["bitcoin"], START, END, fetcher=fetcher(descriptor, cache_dir=tmp_path))
    sent = len(recorded_server.log)
    assert sent == 1
    f = fetcher(descriptor, cache_dir=tmp_path)
    again = fetch_remote(descriptor, ["bitcoin"], START, END, fetcher=f)
    assert f.requests_sent == 0 and len(recorded_server.log) == sent
    assert again.prices == first.prices


def test_result_independent_of_request_order(descriptor):
    a = fetch_remote(descriptor, ["bitcoin", "ethereum"], START, END, fetcher=fetcher(descriptor))
    b = fetch_remote(descriptor, ["ethereum", "bitcoin"], START, END, fetcher=fetcher(descriptor))
    assert a.prices == b.prices and list(a.prices) == list(b.prices)


def test_empty_coin_list_issues_no_requests(descriptor, recorded_server):
    f = fetcher(descriptor)
    ds = fetch_remote(descriptor, [], START, END, fetcher=f)
    assert ds.prices == {} and ds.snapshot == {}
    assert f.requests_sent == 0 and recorded_server.log == []


def test_missing_field_is_schema_mismatch(descriptor):
    with pytest.raises(SchemaMismatch, match="prices"):
        fetch_remote(descriptor, ["broken"], START, END, fetcher=fetcher(descriptor))


def test_non_json_body(descriptor):
    with pytest.raises(SchemaMismatch, match="not JSON"):
        fetch_remote(descriptor, ["garbage"], START, END, fetcher=fetcher(descriptor))


def test_missing_snapshot_path_is_schema_mismatch(descriptor):
    bad = dataclasses.replace(descriptor, snapshot_fields={"price": "market_data.price_now.usd"})
    with pytest.raises(SchemaMismatch, match="market_data.price_now.usd"):
        fetch_remote(bad, ["bitcoin"], START, END, snapshot_date=SNAP_DAY, fetcher=fetcher(bad))


def test_retries_then_succeeds(descriptor, recorded_server):
    recorded_server.script = [503, 429]
    delays = []
    f = Fetcher(descriptor, rate_limit=1000.0, max_retries=3, backoff=0.25, sleep=delays.append)
    ds = fetch_remote(descriptor, ["bitcoin"], START, END, fetcher=f)
    assert len(ds.prices["bitcoin"]) == 5
    assert f.requests_sent == 3
    assert [d for d in delays if d >= 0.25] == [0.25, 0.5]


def test_gives_up_after_cap(descriptor, recorded_server):
    recorded_server.script = [500] * 10
    f = fetcher(descriptor, max_retries=2)
    with pytest.raises(NetworkError, match="3 attempts"):
        fetch_remote(descriptor, ["bitcoin"], START, END, fetcher=f)
    assert f.requests_sent == 3


def test_client_error_not_retried(descriptor):
    f = fetcher(descriptor)
    with pytest.raises(NetworkError, match="404"):
        fetch_remote(descriptor, ["unknown-coin"], START, END, fetcher=f)
    assert f.requests_sent == 1


def test_unreachable_host_is_network_error(descriptor):
    dead = dataclasses.replace(descriptor, base_url="http://127.0.0.1:9", timeout=0.5)
    with pytest.raises(NetworkError):
        fetch_remote(dead, ["bitcoin"], START, END, fetcher=fetcher(dead, max_retries=1))


def test_api_key_header_from_env(descriptor, monkeypatch):
    monkeypatch.setenv("CRYPTOHET_TEST_KEY", "sekret")
    assert fetcher(descriptor).headers["x-cg-demo-api-key"] == "sekret"


def test_rate_limiter_spacing():
    now = [0.0]
    slept = []

    def sleep(d):
        slept.append(d)
        now[0] += d

    lim = RateLimiter(4.0, clock=lambda: now[0], sleep=sleep)
    for _ in range(5):
        lim.wait()
    assert slept == [0.25] * 4


def test_latest_point_of_each_utc_day_wins():
    ms = 1514764800000
    s = prices_from_points("x", [[ms, 1.0], [ms + 3600_000, 2.0], [ms + 86400_000, 3.0]], START, END)
    assert s.closes == (2.0, 3.0)


def test_config_errors(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[endpoint:x]\nbase_url = http://h\n")
    with pytest.raises(ConfigError, match="prices_path"):
        load_config(p)
    p.write_text("[endpoint:x]\nbase_url = h\nprices_path = /p\nfield.cap = a.b\n")
    with pytest.raises(ConfigError):
        load_config(p)
    p.write_text("[oops]\n")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")
