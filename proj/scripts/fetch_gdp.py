#!/usr/bin/env python3
"""Download GDP per capita, PPP (constant 2021 international $) for the
Americas from the World Bank API and write data/americas_gdp_2023.csv.

Countries without a positive, finite value for the year are dropped.
"""
import argparse
import csv
import math
import sys

import requests

INDICATOR = "NY.GDP.PCAP.PP.KD"

# World Bank economies in North, Central and South America and the Caribbean.
AMERICAS = [
    "ABW", "ARG", "ATG", "BHS", "BLZ", "BMU", "BOL", "BRA", "BRB", "CAN",
    "CHL", "COL", "CRI", "CUB", "CUW", "CYM", "DMA", "DOM", "ECU", "GRD",
    "GTM", "GUY", "HND", "HTI", "JAM", "KNA", "LCA", "MAF", "MEX", "NIC",
    "PAN", "PER", "PRI", "PRY", "SLV", "SUR", "SXM", "TCA", "TTO", "URY",
    "USA", "VCT", "VEN", "VGB", "VIR",
]


def fetch(year):
    url = (
        "https://api.worldbank.org/v2/country/"
        + ";".join(AMERICAS)
        + f"/indicator/{INDICATOR}"
    )
    resp = requests.get(
        url, params={"date": str(year), "format": "json", "per_page": 500}, timeout=60
    )
    resp.raise_for_status()
    payload = resp.json()
    if len(payload) < 2 or payload[1] is None:
        raise RuntimeError(f"unexpected API response: {payload!r:.200}")
    return payload[1]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--year", type=int, default=2023)
    parser.add_argument("--output", default="data/americas_gdp_2023.csv")
    args = parser.parse_args()

    rows = []
    for rec in fetch(args.year):
        value = rec.get("value")
        if value is None or not math.isfinite(value) or value <= 0:
            continue
        rows.append((rec["country"]["value"], rec["countryiso3code"], INDICATOR, value))
    rows.sort()

    with open(args.output, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["country_name", "country_code", "indicator_code", str(args.year)])
        out.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.output}", file=sys.stderr)


if __name__ == "__main__":
    main()
