"""On-disk scenario store: a manifest plus one JSON document per check-in date.

Documents are immutable once written; the manifest indexes the dates and
carries the property's rate ladder and horizon. All money amounts in the
files are integer minor currency units; dates are ISO-8601 strings.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .domain import DemandScenario, RateLadder


class StoreError(ValueError):
    """Invalid or inconsistent store contents."""


@dataclass(frozen=True)
class PropertyConfig:
    """A property's pricing setup; rates in the config file are major units."""

    name: str
    capacity: int
    rate_minimum: int  # minor units
    rate_maximum: int
    rate_step: int
    horizon_days: int
    currency: str = "EUR"

    def __post_init__(self) -> None:
        if self.capacity <= 0:
            raise StoreError("capacity must be positive")
        if self.horizon_days < 3:
            raise StoreError("horizon must cover at least 3 days")

    @property
    def ladder(self) -> RateLadder:
        return RateLadder.from_bounds(self.rate_minimum, self.rate_maximum, self.rate_step)

    @classmethod
    def from_json_file(cls, path: str | Path) -> "PropertyConfig":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        try:
            return cls(
                name=doc["name"],
                capacity=int(doc["capacity"]),
                rate_minimum=int(round(doc["rate_minimum"] * 100)),
                rate_maximum=int(round(doc["rate_maximum"] * 100)),
                rate_step=int(round(doc["rate_step"] * 100)),
                horizon_days=int(doc["horizon_days"]),
                currency=doc.get("currency", "EUR"),
            )
        except KeyError as exc:
            raise StoreError(f"property config missing field {exc}") from exc

    def to_manifest_dict(self) -> dict:
        return {
            "name": self.name,
            "capacity": self.capacity,
            "rate_minimum_minor": self.rate_minimum,
            "rate_maximum_minor": self.rate_maximum,
            "rate_step_minor": self.rate_step,
            "horizon_days": self.horizon_days,
            "currency": self.currency,
        }

    @classmethod
    def from_manifest_dict(cls, doc: dict) -> "PropertyConfig":
        return cls(
            name=doc["name"],
            capacity=int(doc["capacity"]),
            rate_minimum=int(doc["rate_minimum_minor"]),
            rate_maximum=int(doc["rate_maximum_minor"]),
            rate_step=int(doc["rate_step_minor"]),
            horizon_days=int(doc["horizon_days"]),
            currency=doc.get("currency", "EUR"),
        )


def scenario_to_document(scenario: DemandScenario) -> dict:
    return {
        "checkin_date": scenario.checkin_date.isoformat(),
        "cumulated": scenario.cumulated,
        "rates_minor": list(scenario.rates),
        "counts": scenario.counts.tolist(),
    }


def scenario_from_document(doc: dict) -> DemandScenario:
    return DemandScenario(
        checkin_date=dt.date.fromisoformat(doc["checkin_date"]),
        rates=tuple(doc["rates_minor"]),
        counts=np.asarray(doc["counts"], dtype=np.int64),
        cumulated=bool(doc["cumulated"]),
    )


class ScenarioStore:
    """Directory layout: manifest.json plus scenarios/<date>.json documents."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    def _scenario_path(self, date: dt.date) -> Path:
        return self.root / "scenarios" / f"{date.isoformat()}.json"

    @classmethod
    def create(
        cls,
        root: str | Path,
        config: PropertyConfig,
        scenarios: Iterable[DemandScenario],
    ) -> "ScenarioStore":
        store = cls(root)
        if store.manifest_path.exists():
            raise StoreError(f"store already exists at {store.root}")
        store.root.mkdir(parents=True, exist_ok=True)
        (store.root / "scenarios").mkdir(exist_ok=True)
        dates = []
        for scenario in sorted(scenarios, key=lambda s: s.checkin_date):
            store._write_scenario(scenario)
            dates.append(scenario.checkin_date.isoformat())
        manifest = {"property": config.to_manifest_dict(), "dates": dates}
        store.manifest_path.write_text(
            json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
        )
        return store

    def _write_scenario(self, scenario: DemandScenario) -> None:
        path = self._scenario_path(scenario.checkin_date)
        if path.exists():
            raise StoreError(f"scenario document {path.name} is immutable")
        path.write_text(
            json.dumps(scenario_to_document(scenario), sort_keys=True),
            encoding="utf-8",
        )

    def manifest(self) -> dict:
        if not self.manifest_path.exists():
            raise StoreError(f"no manifest at {self.manifest_path}")
        return json.loads(self.manifest_path.read_text(encoding="utf-8"))

    def property_config(self) -> PropertyConfig:
        return PropertyConfig.from_manifest_dict(self.manifest()["property"])

    def dates(self) -> list[dt.date]:
        return [dt.date.fromisoformat(d) for d in self.manifest()["dates"]]

    def load(self, date: dt.date) -> DemandScenario:
        path = self._scenario_path(date)
        if not path.exists():
            raise KeyError(f"no scenario stored for {date.isoformat()}")
        return scenario_from_document(json.loads(path.read_text(encoding="utf-8")))

    def load_all(self) -> list[DemandScenario]:
        return [self.load(d) for d in self.dates()]

    def validate(self) -> None:
        """Manifest dates and documents on disk must agree exactly."""
        listed = {d.isoformat() for d in self.dates()}
        on_disk = {p.stem for p in (self.root / "scenarios").glob("*.json")}
        if listed != on_disk:
            missing = listed - on_disk
            extra = on_disk - listed
            raise StoreError(
                f"manifest/document mismatch: missing={sorted(missing)} "
                f"extra={sorted(extra)}"
            )
