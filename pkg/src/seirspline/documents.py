"""Model persistence: the versioned JSON document and the on-disk store.

Documents are serialized canonically (sorted keys, fixed separators) so
save -> load -> save is byte-identical and identical fits produce
byte-identical files. Model ids are content hashes of (data fingerprint,
config), which makes re-fits idempotent in the store.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path

from .errors import DataError, FormatError
from .fitting import FitConfig, FitReport, ObservationSet
from .ingest import RawTimeSeriesTable, parse_timeseries_csv

SCHEMA_VERSION = "1"

DATA_FILES = {
    "confirmed": "time_series_covid19_confirmed_global.csv",
    "recovered": "time_series_covid19_recovered_global.csv",
    "deaths": "time_series_covid19_deaths_global.csv",
}


@dataclass(frozen=True)
class ModelDocument:
    country: str
    t1: date
    t4: date
    population_n: float
    sigma: float
    lam: float
    scale: float
    report: FitReport
    observations: ObservationSet  # embedded so projection needs no data dir
    data_fingerprint: str
    created_at: str | None = None
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "country": self.country,
            "t1": self.t1.isoformat(),
            "t4": self.t4.isoformat(),
            "population_n": self.population_n,
            "sigma": self.sigma,
            "lambda": self.lam,
            "scale": self.scale,
            "models": self.report.to_dict(),
            "observations": self.observations.to_dict(),
            "data_fingerprint": self.data_fingerprint,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelDocument":
        if "schema_version" not in d:
            raise FormatError("model document missing schema_version")
        return cls(
            country=d["country"],
            t1=date.fromisoformat(d["t1"]),
            t4=date.fromisoformat(d["t4"]),
            population_n=d["population_n"],
            sigma=d["sigma"],
            lam=d["lambda"],
            scale=d["scale"],
            report=FitReport.from_dict(d["models"]),
            observations=ObservationSet.from_dict(d["observations"]),
            data_fingerprint=d["data_fingerprint"],
            created_at=d.get("created_at"),
            schema_version=d["schema_version"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ModelDocument":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "ModelDocument":
        return cls.from_json(Path(path).read_text())

    def model_id(self) -> str:
        return model_id(self.data_fingerprint, self.report.config)


def model_id(data_fingerprint: str, config: FitConfig) -> str:
    payload = data_fingerprint + ":" + json.dumps(
        config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def default_created_at() -> str | None:
    """Deterministic by default: only SOURCE_DATE_EPOCH yields a timestamp."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is None:
        return None
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()


def now_timestamp() -> str:
    return datetime.now(tz=timezone.utc).isoformat()


class ModelStore:
    """Directory of model documents, one JSON file per id.

    Writes are serialized and atomic (temp file + rename); an existing id
    is never overwritten, so re-fitting identical inputs returns the
    originally persisted document.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def path_of(self, doc_id: str) -> Path:
        if not doc_id.isalnum():
            raise DataError(f"invalid model id: {doc_id!r}")
        return self.root / f"{doc_id}.json"

    def get(self, doc_id: str) -> ModelDocument:
        path = self.path_of(doc_id)
        if not path.exists():
            raise DataError(f"unknown model id: {doc_id}")
        return ModelDocument.load(path)

    def put(self, doc: ModelDocument) -> tuple[str, ModelDocument]:
        """Persist doc; returns (id, stored document)."""
        doc_id = doc.model_id()
        with self._lock:
            path = self.path_of(doc_id)
            if path.exists():
                return doc_id, ModelDocument.load(path)
            fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
            try:
                with os.fdopen(fd, "w") as fh:
                    fh.write(doc.to_json())
                os.replace(tmp, path)
            finally:
                if os.path.exists(tmp):
                    os.unlink(tmp)
        return doc_id, doc

    def ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))


@dataclass(frozen=True)
class DataDirectory:
    """The three parsed cumulative tables plus the population lookup."""

    confirmed: RawTimeSeriesTable
    recovered: RawTimeSeriesTable
    deaths: RawTimeSeriesTable
    populations: dict

    def countries(self) -> list[str]:
        common = (set(self.confirmed.entries)
                  & set(self.recovered.entries)
                  & set(self.deaths.entries))
        return sorted(common)

    def population_of(self, country: str) -> float:
        try:
            return float(self.populations[country])
        except KeyError:
            raise DataError(
                f"no population configured for {country!r}; pass one explicitly"
            ) from None


def load_data_directory(data_dir) -> DataDirectory:
    root = Path(data_dir)
    tables = {}
    for kind, filename in DATA_FILES.items():
        path = root / filename
        if not path.exists():
            raise DataError(f"missing data file: {path}")
        tables[kind] = parse_timeseries_csv(path.read_text(), kind)
    pop_path = root / "populations.json"
    populations = json.loads(pop_path.read_text()) if pop_path.exists() else {}
    return DataDirectory(
        confirmed=tables["confirmed"],
        recovered=tables["recovered"],
        deaths=tables["deaths"],
        populations=populations,
    )
