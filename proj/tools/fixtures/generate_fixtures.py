#!/usr/bin/env python3
"""Regenerate the bundled daily-price fixtures under data/fixtures/.

The fixtures are synthetic: log prices follow Brownian bridges pinned to
approximate historical closing levels, sampled on the NYSE trading calendar
for 2011-01-03 .. 2020-12-31. Output is deterministic for a fixed seed.

Writes, per symbol:
  data/fixtures/csv/<STEM>.csv     Yahoo daily-history export layout
  data/fixtures/chart/<STEM>.json  v8 chart payload for the replay endpoint
"""

import argparse
import datetime as dt
import json
import math
import pathlib
from zoneinfo import ZoneInfo

import numpy as np

NY = ZoneInfo("America/New_York")

# symbol -> (annual volatility, adj-close yield, typical volume, anchors)
# Anchors are approximate closes (split-adjusted as of early 2021).
SYMBOLS = {
    "MSFT": (0.25, 0.020, 3.0e7, [
        ("2011-01-03", 27.98), ("2011-12-30", 25.96), ("2012-12-31", 26.71),
        ("2013-12-31", 37.41), ("2014-12-31", 46.45), ("2015-12-31", 55.48),
        ("2016-12-30", 62.14), ("2017-12-29", 85.54), ("2018-12-31", 101.57),
        ("2019-12-31", 157.70), ("2020-02-19", 187.28), ("2020-03-16", 135.42),
        ("2020-12-31", 222.42),
    ]),
    "TSLA": (0.55, 0.0, 9.0e7, [
        ("2011-01-03", 5.32), ("2011-12-30", 5.71), ("2012-12-31", 6.77),
        ("2013-03-28", 7.55), ("2013-09-30", 38.63), ("2013-12-31", 30.09),
        ("2014-12-31", 44.48), ("2015-12-31", 48.00), ("2016-12-30", 42.74),
        ("2017-12-29", 62.27), ("2018-12-31", 66.56), ("2019-12-31", 83.67),
        ("2020-03-18", 72.24), ("2020-08-31", 498.32), ("2020-12-31", 705.67),
    ]),
    "^GSPC": (0.17, 0.0, 3.5e9, [
        ("2011-01-03", 1271.87), ("2011-10-03", 1099.23), ("2011-12-30", 1257.60),
        ("2012-12-31", 1426.19), ("2013-12-31", 1848.36), ("2014-12-31", 2058.90),
        ("2015-12-31", 2043.94), ("2016-12-30", 2238.83), ("2017-12-29", 2673.61),
        ("2018-09-20", 2930.75), ("2018-12-24", 2351.10), ("2018-12-31", 2506.85),
        ("2019-12-31", 3230.78), ("2020-02-19", 3386.15), ("2020-03-23", 2237.40),
        ("2020-12-31", 3756.07),
    ]),
    "^RUMIC": (0.22, 0.0, 0.0, [
        ("2011-01-03", 500.0), ("2011-10-03", 380.0), ("2011-12-30", 440.0),
        ("2012-12-31", 500.0), ("2013-12-31", 730.0), ("2014-12-31", 750.0),
        ("2015-12-31", 710.0), ("2016-12-30", 850.0), ("2017-12-29", 950.0),
        ("2018-12-31", 840.0), ("2019-12-31", 1020.0), ("2020-03-18", 600.0),
        ("2020-12-31", 1300.0),
    ]),
}

STRESS = (dt.date(2020, 2, 20), dt.date(2020, 4, 30), 2.5)


def easter(year):
    a = year % 19
    b, c = divmod(year, 100)
    d, e = divmod(b, 4)
    f = (b + 8) // 25
    g = (b - f + 1) // 3
    h = (19 * a + b - d - g + 15) % 30
    i, k = divmod(c, 4)
    l = (32 + 2 * e + 2 * i - h - k) % 7
    m = (a + 11 * h + 22 * l) // 451
    month, day = divmod(h + l - 7 * m + 114, 31)
    return dt.date(year, month, day + 1)


def nth_weekday(year, month, weekday, n):
    d = dt.date(year, month, 1)
    d += dt.timedelta(days=(weekday - d.weekday()) % 7)
    return d + dt.timedelta(weeks=n - 1)


def last_weekday(year, month, weekday):
    d = dt.date(year, month + 1, 1) - dt.timedelta(days=1)
    return d - dt.timedelta(days=(d.weekday() - weekday) % 7)


def observed(d):
    if d.weekday() == 5:
        return d - dt.timedelta(days=1)
    if d.weekday() == 6:
        return d + dt.timedelta(days=1)
    return d


def nyse_holidays(year):
    days = {
        nth_weekday(year, 1, 0, 3),
        nth_weekday(year, 2, 0, 3),
        easter(year) - dt.timedelta(days=2),
        last_weekday(year, 5, 0),
        observed(dt.date(year, 7, 4)),
        nth_weekday(year, 9, 0, 1),
        nth_weekday(year, 11, 3, 4),
        observed(dt.date(year, 12, 25)),
    }
    new_year = dt.date(year, 1, 1)
    # A Saturday New Year is not observed on the prior Friday.
    if new_year.weekday() != 5:
        days.add(observed(new_year))
    return days


SPECIAL_CLOSURES = {dt.date(2012, 10, 29), dt.date(2012, 10, 30), dt.date(2018, 12, 5)}


def trading_days(start, end):
    holidays = set(SPECIAL_CLOSURES)
    for y in range(start.year, end.year + 1):
        holidays |= nyse_holidays(y)
    out, d = [], start
    while d < end:
        if d.weekday() < 5 and d not in holidays:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def bridge_log_path(days, anchors, daily_sigma, rng):
    index = {d: i for i, d in enumerate(days)}
    pins = [(index[dt.date.fromisoformat(s)], math.log(v)) for s, v in anchors]
    logp = np.empty(len(days))
    logp[pins[0][0]] = pins[0][1]
    for (i0, a), (i1, b) in zip(pins, pins[1:]):
        n = i1 - i0
        scale = np.array([STRESS[2] if STRESS[0] <= days[i0 + k + 1] <= STRESS[1] else 1.0
                          for k in range(n)])
        w = np.cumsum(rng.normal(0.0, daily_sigma, n) * scale)
        frac = np.arange(1, n + 1) / n
        logp[i0 + 1:i1 + 1] = a + (b - a) * frac + w - frac * w[-1]
    return logp


def build_bars(symbol, days, rng):
    vol, yld, volume, anchors = SYMBOLS[symbol]
    sigma = vol / math.sqrt(252.0)
    close = np.exp(bridge_log_path(days, anchors, sigma, rng))
    bars = []
    prev = close[0] * math.exp(rng.normal(0.0, sigma))
    years_left = np.array([(days[-1] - d).days / 365.25 for d in days])
    for k, d in enumerate(days):
        c = round(float(close[k]), 6)
        o = round(float(prev * math.exp(rng.normal(0.0, 0.3 * sigma))), 6)
        h = round(max(o, c) * math.exp(abs(rng.normal(0.0, 0.5 * sigma))), 6)
        lo = round(min(o, c) * math.exp(-abs(rng.normal(0.0, 0.5 * sigma))), 6)
        h, lo = max(h, o, c), min(lo, o, c)
        adj = round(c * math.exp(-yld * years_left[k]), 6)
        v = int(volume * math.exp(rng.normal(0.0, 0.35))) if volume > 0 else 0
        bars.append((d, o, h, lo, c, adj, v))
        prev = close[k]
    return bars


def stem(symbol):
    return symbol.lstrip("^")


def write_csv(path, bars):
    with open(path, "w", newline="\n") as f:
        f.write("Date,Open,High,Low,Close,Adj Close,Volume\n")
        for d, o, h, lo, c, adj, v in bars:
            f.write(f"{d.isoformat()},{o:.6f},{h:.6f},{lo:.6f},{c:.6f},{adj:.6f},{v}\n")


def write_chart(path, symbol, bars):
    stamps = [int(dt.datetime(d.year, d.month, d.day, 9, 30, tzinfo=NY).timestamp())
              for d, *_ in bars]
    payload = {"chart": {"result": [{
        "meta": {"currency": "USD", "symbol": symbol, "exchangeName": "NMS",
                 "instrumentType": "EQUITY" if not symbol.startswith("^") else "INDEX",
                 "dataGranularity": "1d", "timezone": "EST",
                 "exchangeTimezoneName": "America/New_York"},
        "timestamp": stamps,
        "indicators": {
            "quote": [{
                "open": [b[1] for b in bars],
                "high": [b[2] for b in bars],
                "low": [b[3] for b in bars],
                "close": [b[4] for b in bars],
                "volume": [b[6] for b in bars],
            }],
            "adjclose": [{"adjclose": [b[5] for b in bars]}],
        },
    }], "error": None}}
    with open(path, "w") as f:
        json.dump(payload, f, separators=(",", ":"))
        f.write("\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[2]
                                             / "data" / "fixtures"))
    parser.add_argument("--seed", type=int, default=20110103)
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    (out / "csv").mkdir(parents=True, exist_ok=True)
    (out / "chart").mkdir(parents=True, exist_ok=True)
    days = trading_days(dt.date(2011, 1, 1), dt.date(2021, 1, 1))
    for n, symbol in enumerate(SYMBOLS):
        rng = np.random.default_rng([args.seed, n])
        bars = build_bars(symbol, days, rng)
        write_csv(out / "csv" / f"{stem(symbol)}.csv", bars)
        write_chart(out / "chart" / f"{stem(symbol)}.json", symbol, bars)
        print(f"{symbol}: {len(bars)} bars, close {bars[0][4]:.2f} -> {bars[-1][4]:.2f}")


if __name__ == "__main__":
    main()
