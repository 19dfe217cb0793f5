"""Spreadsheet-style ledger for the scripted 3-symbol, 4-month scenario.

Writes tests/fixtures/ledger_scenario.csv and prints the expected trade log,
cost totals and final equity. The accounting rules, applied day by day:

  1. mark held positions at the day's close (last known close if missing)
  2. from the second day on, charge financing on gross value above equity
     and a borrow fee on short value, both at annual rate / 252
  3. on the first day and on each month's first trading day, trade to
     weight * leverage * equity / close shares, truncated toward zero;
     commission per share, slippage as a fraction of traded value; a target
     without a close is skipped and the same-side targets scaled up
  4. record equity = cash + sum(shares * close)
"""

import datetime as dt
import math
import pathlib

HERE = pathlib.Path(__file__).resolve().parent
FIXTURE = HERE.parent / "fixtures" / "ledger_scenario.csv"

INITIAL = 100_000.0
COMMISSION = 0.005
SLIPPAGE = 0.0005
FINANCING = 0.05
BORROW = 0.03
LEVERAGE = 1.5

SCHEDULE = {
    "2021-01-04": {"A": 0.5, "B": 0.3, "C": -0.2},
    "2021-02-01": {"A": 0.2, "B": -0.3, "C": 0.4},
    "2021-03-01": {"A": 0.3, "B": 0.3, "C": 0.3},
    "2021-04-01": {"A": -0.4, "B": 0.4, "C": 0.2},
}
MISSING = {("C", "2021-03-01")}


def weekdays(start, end):
    d = start
    while d <= end:
        if d.weekday() < 5:
            yield d
        d += dt.timedelta(days=1)


def close_of(symbol, i):
    if symbol == "A":
        return round(100 + 0.5 * i + 3 * math.sin(i / 3), 2)
    if symbol == "B":
        return round(50 + 4 * math.cos(i / 5) - 0.1 * i, 2)
    if symbol == "C":
        return round(20 + 0.05 * i + ((i * 7) % 5 - 2) * 0.3, 2)
    return round(1000 + 2 * i, 2)


def write_fixture(dates):
    rows = ["date,symbol,open,high,low,close,volume"]
    for i, d in enumerate(dates):
        iso = d.isoformat()
        for sym in ("A", "B", "C", "IDX"):
            if (sym, iso) in MISSING:
                continue
            c = close_of(sym, i)
            rows.append(f"{iso},{sym},{c},{round(c * 1.01, 2)},{round(c * 0.99, 2)},{c},1000")
    FIXTURE.parent.mkdir(parents=True, exist_ok=True)
    FIXTURE.write_text("\n".join(rows) + "\n")


def main():
    dates = list(weekdays(dt.date(2021, 1, 4), dt.date(2021, 4, 30)))
    write_fixture(dates)

    cash = INITIAL
    shares = {}
    last = {}
    commission_total = slippage_total = financing_total = 0.0
    trades = []
    seen_months = set()
    equity = INITIAL
    for i, d in enumerate(dates):
        iso = d.isoformat()
        closes = {s: close_of(s, i) for s in "ABC" if (s, iso) not in MISSING}
        for s in shares:
            if s in closes:
                last[s] = closes[s]
        values = {s: q * last[s] for s, q in shares.items()}
        equity = cash + sum(values.values())
        if i > 0:
            gross = sum(abs(v) for v in values.values())
            short = sum(-v for v in values.values() if v < 0)
            fin = FINANCING / 252 * max(0.0, gross - equity) + BORROW / 252 * short
            cash -= fin
            equity -= fin
            financing_total += fin

        month = (d.year, d.month)
        if i == 0 or month not in seen_months:
            seen_months.add(month)
            target = {s: w * LEVERAGE for s, w in SCHEDULE[iso].items()}
            long_total = sum(w for w in target.values() if w > 0)
            short_total = sum(w for w in target.values() if w < 0)
            long_priced = sum(w for s, w in target.items() if w > 0 and s in closes)
            short_priced = sum(w for s, w in target.items() if w < 0 and s in closes)
            if any(s not in closes for s, w in target.items() if w != 0):
                ls = long_total / long_priced if long_priced else 0.0
                ss = short_total / short_priced if short_priced else 0.0
                target = {s: (w * (ls if w > 0 else ss) if s in closes else w)
                          for s, w in target.items()}
            new_shares = {}
            for s in sorted(set(shares) | set(target)):
                held = shares.get(s, 0.0)
                if s not in closes:
                    if held:
                        new_shares[s] = held
                    continue
                px = closes[s]
                want = float(math.trunc(target.get(s, 0.0) * equity / px))
                delta = want - held
                if want:
                    new_shares[s] = want
                if delta == 0:
                    continue
                comm = abs(delta) * COMMISSION
                slip = abs(delta) * px * SLIPPAGE
                cash -= delta * px + comm + slip
                commission_total += comm
                slippage_total += slip
                trades.append((iso, s, delta, px, comm, slip))
                last[s] = px
            shares = new_shares
            equity = cash + sum(q * last[s] for s, q in shares.items())

    for t in trades:
        print("trade", *t)
    print(f"n_days {len(dates)}")
    print(f"commission_total {commission_total!r}")
    print(f"slippage_total {slippage_total!r}")
    print(f"financing_total {financing_total!r}")
    print(f"final_equity {equity!r}")


if __name__ == "__main__":
    main()
