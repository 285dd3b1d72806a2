"""Parsing of the wide-format global time-series CSVs.

Expected layout: header `Province/State,Country/Region,Lat,Long` followed
by date columns in M/D/YY form; one row per country or per province, with
cumulative counts. Province rows are summed into one national series.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

from .errors import DataError, FormatError
from .fitting import ObservationSet

log = logging.getLogger(__name__)

EXPECTED_HEADER = ("Province/State", "Country/Region", "Lat", "Long")
SERIES_KINDS = ("confirmed", "recovered", "deaths")


@dataclass(frozen=True)
class RawTimeSeriesTable:
    """Per-country cumulative series for one kind of count."""

    kind: str
    dates: tuple  # consecutive calendar dates, one per value column
    entries: dict = field(repr=False)  # country -> np.ndarray[int64]

    @property
    def date_range(self):
        if not self.dates:
            return None
        return (self.dates[0], self.dates[-1])

    def countries(self) -> list[str]:
        return sorted(self.entries)

    def series(self, country: str) -> np.ndarray:
        try:
            return self.entries[country]
        except KeyError:
            raise DataError(f"unknown country: {country!r}") from None

    def index_of(self, day: date) -> int:
        if not self.dates or not self.dates[0] <= day <= self.dates[-1]:
            raise DataError(f"{day} outside table range {self.date_range}")
        return (day - self.dates[0]).days


def _parse_mdyy(cell: str, col: int):
    parts = cell.strip().split("/")
    if len(parts) != 3:
        raise FormatError(f"column {col}: expected M/D/YY date, got {cell!r}")
    try:
        m, d, yy = (int(p) for p in parts)
        return date(2000 + yy, m, d)
    except ValueError as exc:
        raise FormatError(f"column {col}: bad date {cell!r}: {exc}") from None


def parse_timeseries_csv(content, kind: str) -> RawTimeSeriesTable:
    """Parse one wide-format CSV into a RawTimeSeriesTable.

    `content` may be a str, bytes, or a text file object. Quoted fields
    (country names containing commas) are handled by the csv module.
    """
    if kind not in SERIES_KINDS:
        raise FormatError(f"unknown series kind {kind!r}; expected one of {SERIES_KINDS}")
    if isinstance(content, bytes):
        content = content.decode("utf-8-sig")
    if isinstance(content, str):
        content = io.StringIO(content)
    reader = csv.reader(content)
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty table") from None
    if tuple(h.strip() for h in header[:4]) != EXPECTED_HEADER:
        raise FormatError(
            f"malformed header: expected columns {EXPECTED_HEADER}, got {header[:4]}")
    dates = [_parse_mdyy(cell, col) for col, cell in enumerate(header[4:], start=4)]
    for prev, cur in zip(dates, dates[1:]):
        if cur != prev + timedelta(days=1):
            raise FormatError(f"date columns not consecutive: {prev} -> {cur}")
    entries: dict[str, np.ndarray] = {}
    for row_no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4 + len(dates):
            raise FormatError(
                f"row {row_no}: expected {4 + len(dates)} fields, got {len(row)}")
        country = row[1].strip()
        values = np.empty(len(dates), dtype=np.int64)
        for j, cell in enumerate(row[4:]):
            try:
                values[j] = int(float(cell))
            except ValueError:
                raise FormatError(
                    f"row {row_no}, column {4 + j}: non-numeric cell {cell!r}") from None
        if country in entries:
            entries[country] = entries[country] + values
        else:
            entries[country] = values
    return RawTimeSeriesTable(kind=kind, dates=tuple(dates), entries=entries)


def derive_observations(confirmed: RawTimeSeriesTable,
                        recovered: RawTimeSeriesTable,
                        deaths: RawTimeSeriesTable,
                        country: str, t1: date, t4: date,
                        population_n: float, scale: float = 1.0) -> ObservationSet:
    """Build the fitting series for one country over [t1, t4].

    idata is the clamped first difference of cumulative confirmed (t1's
    difference uses the prior day, which must exist in the table); rcum is
    recovered + deaths rebased to 0 at t1. Both are multiplied by scale.
    """
    if population_n <= 0:
        raise DataError("population_n must be > 0")
    if t4 <= t1:
        raise DataError("t4 must be after t1")
    conf = confirmed.series(country)
    reco = recovered.series(country)
    dead = deaths.series(country)
    if confirmed.dates[0] >= t1:
        raise DataError(
            f"window start {t1} needs the prior day in the data "
            f"(table starts {confirmed.dates[0]})")
    for table in (confirmed, recovered, deaths):
        table.index_of(t1)
        table.index_of(t4)
    a = confirmed.index_of(t1)
    b = confirmed.index_of(t4)
    diffs = np.diff(conf[a - 1:b + 1]).astype(np.float64)
    negative = diffs < 0
    if np.any(negative):
        log.warning("%s: %d negative daily diffs clamped to 0 (data corrections)",
                    country, int(np.sum(negative)))
        diffs = np.maximum(diffs, 0.0)
    ar = recovered.index_of(t1)
    ad = deaths.index_of(t1)
    removed = (reco[ar:ar + (b - a) + 1] + dead[ad:ad + (b - a) + 1]).astype(np.float64)
    removed = removed - removed[0]
    return ObservationSet(
        country=country,
        t1=t1,
        t4=t4,
        idata=diffs * scale,
        rcum=removed * scale,
        population_n=population_n,
        scale=scale,
    )
