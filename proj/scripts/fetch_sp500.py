#!/usr/bin/env python3
"""Fetches the public SP500 benchmark (25 stocks, 1998-2003) into data/.

The dataset is not bundled with the repository because its redistribution
rights are unclear; this script downloads it from a public mirror (or
converts a local copy passed via --from-file) and writes:

  data/sp500.csv          canonical price-relatives table: date,<tickers>
  data/sp500_sectors.txt  best-effort 4-sector map regenerated against the
                          actual header (unmapped tickers fall into Services)

Both a SHA256 of the raw download and of the canonical output are printed so
results can be pinned. Only the Python standard library is used.

The source format is auto-detected: a file of raw prices is converted to
ratios p_t / p_{t-1}; a file already holding relatives (values clustered
around 1.0) is taken verbatim. Override with --mode if the heuristic guesses
wrong. The sector assignment is configuration, not ground truth — edit
data/sp500_sectors.txt freely; the backtester only requires that every
ticker is covered by some sector.
"""

import argparse
import csv
import hashlib
import io
import os
import sys
import urllib.error
import urllib.request

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")

# Public mirrors that have carried this benchmark, tried in order.
DEFAULT_URLS = [
    "https://raw.githubusercontent.com/Marigold/universal-portfolios/master/universal/data/sp500.csv",
    "https://raw.githubusercontent.com/Marigold/universal-portfolios/master/data/sp500.csv",
]

# Best-effort ticker -> sector assignment (large caps of the 1998-2003 era,
# bucketed into the four sectors used throughout this project). Anything not
# listed lands in Services, which doubles as the catch-all bucket.
SECTOR_OF = {}
for _sector, _tickers in {
    "Technology": [
        "AAPL", "MSFT", "IBM", "INTC", "ORCL", "CSCO", "DELL", "HPQ", "TXN",
        "SUNW", "EMC", "MOT", "XRX", "NT", "LU", "AMD", "MU", "ADBE", "CA",
        "UIS", "NSM", "AMAT",
    ],
    "Finance": [
        "C", "JPM", "BAC", "WFC", "AXP", "MER", "AIG", "FNM", "FRE", "MS",
        "GS", "ONE", "BK", "USB", "SCH", "LEH", "MWD", "CCI",
    ],
    "Healthcare": [
        "JNJ", "PFE", "MRK", "BMY", "ABT", "LLY", "AMGN", "BAX", "MDT",
        "SGP", "WYE", "AHP", "UNH", "HCA", "THC", "CAH",
    ],
    "Services": [
        "WMT", "KO", "PG", "PEP", "MCD", "DIS", "HD", "T", "VZ", "SBC",
        "XOM", "MO", "DD", "CAT", "BA", "MMM", "F", "GM", "GE", "S", "K",
        "AOL", "TWX", "CMCSA", "FDX", "UPS", "TGT", "SWY", "G", "NKE",
    ],
}.items():
    for _t in _tickers:
        SECTOR_OF[_t] = _sector

SECTOR_ORDER = ["Technology", "Finance", "Healthcare", "Services"]


def sha256_hex(blob):
    return hashlib.sha256(blob).hexdigest()


def download(urls):
    last_err = None
    for url in urls:
        try:
            print(f"fetching {url} ...")
            with urllib.request.urlopen(url, timeout=60) as resp:
                return resp.read(), url
        except (urllib.error.URLError, OSError, ValueError) as e:
            print(f"  failed: {e}")
            last_err = e
    raise SystemExit(
        f"error: could not download the dataset ({last_err}); if this "
        "machine has no network access, obtain the file elsewhere and rerun "
        "with --from-file PATH"
    )


def parse_table(blob):
    """Returns (tickers, dates_or_None, rows) from a delimited text blob."""
    if blob[:2] in (b"\x80\x04", b"\x80\x03", b"\x80\x02"):
        raise SystemExit(
            "error: the source looks like a Python pickle, not a CSV; "
            "export it to CSV first (e.g. pandas.read_pickle(...)"
            ".to_csv(path)) and rerun with --from-file"
        )
    text = blob.decode("utf-8-sig")
    sample = text[:4096]
    try:
        dialect = csv.Sniffer().sniff(sample, delimiters=",;\t")
    except csv.Error:
        dialect = csv.excel
    records = [r for r in csv.reader(io.StringIO(text), dialect) if any(c.strip() for c in r)]
    if len(records) < 3:
        raise SystemExit("error: source has fewer than two data rows")

    header = [c.strip() for c in records[0]]
    first_data = [c.strip() for c in records[1]]

    def is_number(tok):
        try:
            float(tok)
            return True
        except ValueError:
            return False

    # A leading date-ish column has a non-numeric first data cell or a
    # header cell named like a date/index column.
    has_date = (not is_number(first_data[0])) or header[0].lower() in ("", "date", "index", "day")
    col0 = 1 if has_date else 0
    tickers = header[col0:]
    if not tickers or any(not t for t in tickers):
        raise SystemExit("error: could not read a ticker header row")

    dates = [] if has_date else None
    rows = []
    for line_no, rec in enumerate(records[1:], start=2):
        cells = [c.strip() for c in rec]
        if len(cells) != len(header):
            raise SystemExit(f"error: row {line_no} has {len(cells)} cells, expected {len(header)}")
        if has_date:
            dates.append(cells[0])
        try:
            rows.append([float(c) for c in cells[col0:]])
        except ValueError as e:
            raise SystemExit(f"error: non-numeric cell in row {line_no}: {e}")
    return tickers, dates, rows


def detect_mode(rows):
    """'relatives' when values cluster around 1.0, else 'prices'."""
    flat = [v for row in rows[: min(len(rows), 50)] for v in row]
    near_one = sum(1 for v in flat if 0.5 <= v <= 2.0)
    return "relatives" if near_one >= 0.95 * len(flat) else "prices"


def to_relatives(rows, dates, mode):
    if mode == "relatives":
        for i, row in enumerate(rows):
            for v in row:
                if not v > 0.0:
                    raise SystemExit(f"error: nonpositive relative {v} in data row {i + 1}")
        return rows, dates
    rel = []
    for prev, cur in zip(rows, rows[1:]):
        for v in prev + cur:
            if not v > 0.0:
                raise SystemExit(f"error: nonpositive price {v}")
        rel.append([c / p for p, c in zip(prev, cur)])
    return rel, dates[1:] if dates is not None else None


def write_outputs(tickers, dates, rel):
    os.makedirs(DATA, exist_ok=True)
    if dates is None:
        dates = [f"d{i + 1:04d}" for i in range(len(rel))]

    csv_path = os.path.join(DATA, "sp500.csv")
    buf = io.StringIO()
    buf.write("date," + ",".join(tickers) + "\n")
    for d, row in zip(dates, rel):
        buf.write(d + "," + ",".join(repr(v) for v in row) + "\n")
    with open(csv_path, "w", newline="") as f:
        f.write(buf.getvalue())

    buckets = {s: [] for s in SECTOR_ORDER}
    unmapped = []
    for t in tickers:
        sector = SECTOR_OF.get(t.upper())
        if sector is None:
            unmapped.append(t)
            sector = "Services"
        buckets[sector].append(t)
    grp_path = os.path.join(DATA, "sp500_sectors.txt")
    with open(grp_path, "w") as f:
        f.write("# Best-effort 4-sector map for the SP500 benchmark.\n")
        f.write("# This is configuration, not ground truth — edit freely; every\n")
        f.write("# ticker must appear in some sector.\n")
        for s in SECTOR_ORDER:
            if buckets[s]:
                f.write(f"{s}: {','.join(buckets[s])}\n")
    if unmapped:
        print(f"note: {len(unmapped)} ticker(s) not in the built-in map were "
              f"placed in Services: {', '.join(unmapped)}")

    print(f"wrote {csv_path}  ({len(rel)} rows x {len(tickers)} stocks)")
    print(f"  sha256 {sha256_hex(open(csv_path, 'rb').read())}")
    print(f"wrote {grp_path}")
    print(f"  sha256 {sha256_hex(open(grp_path, 'rb').read())}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--url", action="append", default=[],
                    help="source URL (may repeat; tried in order before the defaults)")
    ap.add_argument("--from-file", metavar="PATH",
                    help="convert a local copy instead of downloading")
    ap.add_argument("--mode", choices=["auto", "prices", "relatives"], default="auto",
                    help="how to interpret the source values (default: auto-detect)")
    args = ap.parse_args()

    if args.from_file:
        with open(args.from_file, "rb") as f:
            blob = f.read()
        source = args.from_file
    else:
        blob, source = download(args.url + DEFAULT_URLS)
    print(f"source {source}")
    print(f"  sha256 {sha256_hex(blob)}  ({len(blob)} bytes)")

    tickers, dates, rows = parse_table(blob)
    mode = detect_mode(rows) if args.mode == "auto" else args.mode
    print(f"interpreting values as {mode}"
          + (" (auto-detected; override with --mode)" if args.mode == "auto" else ""))
    rel, dates = to_relatives(rows, dates, mode)
    write_outputs(tickers, dates, rel)


if __name__ == "__main__":
    main()
