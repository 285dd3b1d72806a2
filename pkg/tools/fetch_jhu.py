#!/usr/bin/env python3
"""Download the three global time-series CSVs from the JHU CSSE archive.

Files-on-disk is the contract everywhere else in this project; this is
only a convenience for refreshing data/ when network access is available.
"""

import argparse
import urllib.request
from pathlib import Path

BASE = ("https://raw.githubusercontent.com/CSSEGISandData/COVID-19/master/"
        "csse_covid_19_data/csse_covid_19_time_series/")
FILES = [
    "time_series_covid19_confirmed_global.csv",
    "time_series_covid19_deaths_global.csv",
    "time_series_covid19_recovered_global.csv",
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data", help="target directory")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in FILES:
        url = BASE + name
        print(f"fetching {url}")
        with urllib.request.urlopen(url) as resp:
            (out / name).write_bytes(resp.read())
    print(f"wrote {len(FILES)} files to {out}/")


if __name__ == "__main__":
    main()
