"""Clients for the parking-availability and air-quality feeds.

One parser serves HTTP endpoints and local fixture files; records failing
their invariants are dropped with a per-record diagnostic.
"""

from __future__ import annotations

import json
import math
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from .network import GeoPoint, NetworkError

PARKING_TTL_S = 600.0
AIR_QUALITY_TTL_S = 3600.0
POLLUTANTS = ("PM10", "PM2.5", "NO2", "O3")
HTTP_TIMEOUT_S = 10.0


class FeedError(Exception):
    """Unreachable source or unparseable feed document."""


@dataclass(frozen=True)
class ParkingStatus:
    facility_id: str
    name: str
    location: GeoPoint
    capacity: int
    free_spaces: int
    observed_at: float
    stale: bool


@dataclass(frozen=True)
class AirQualityReading:
    station_id: str
    location: GeoPoint
    pollutant: str
    value_ugm3: float
    observed_at: float
    stale: bool


@dataclass
class FeedResult:
    records: list
    dropped: list[str]


def _read_source(source: str | Path) -> dict:
    text_source = str(source)
    if text_source.startswith(("http://", "https://")):
        try:
            with urllib.request.urlopen(text_source, timeout=HTTP_TIMEOUT_S) as resp:
                body = resp.read().decode("utf-8")
        except (urllib.error.URLError, OSError) as exc:
            raise FeedError(f"feed {text_source} unreachable: {exc}") from None
    else:
        try:
            body = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise FeedError(f"feed {source} unreadable: {exc}") from None
    try:
        return json.loads(body)
    except json.JSONDecodeError as exc:
        raise FeedError(f"feed {source}: invalid JSON ({exc})") from None


def fetch_parking(source: str | Path, now: float, ttl_s: float = PARKING_TTL_S) -> FeedResult:
    """Normalized parking facilities with staleness computed against `now`."""
    doc = _read_source(source)
    records: list[ParkingStatus] = []
    dropped: list[str] = []
    for i, entry in enumerate(doc.get("facilities", [])):
        label = f"facility #{i} ({entry.get('id', '?')})"
        try:
            capacity = int(entry["capacity"])
            free = int(entry["free_spaces"])
            observed = float(entry["observed_at"])
            location = GeoPoint(float(entry["lat"]), float(entry["lon"]))
            if capacity <= 0:
                raise ValueError(f"capacity {capacity} not positive")
            if not 0 <= free <= capacity:
                raise ValueError(f"free_spaces {free} outside [0, {capacity}]")
            records.append(
                ParkingStatus(
                    facility_id=str(entry["id"]),
                    name=str(entry.get("name", entry["id"])),
                    location=location,
                    capacity=capacity,
                    free_spaces=free,
                    observed_at=observed,
                    stale=now - observed > ttl_s,
                )
            )
        except (KeyError, TypeError, ValueError, NetworkError) as exc:
            dropped.append(f"{label}: {exc}")
    return FeedResult(records=records, dropped=dropped)


def fetch_air_quality(source: str | Path, now: float, ttl_s: float = AIR_QUALITY_TTL_S) -> FeedResult:
    """Normalized air-quality readings with staleness computed against `now`."""
    doc = _read_source(source)
    records: list[AirQualityReading] = []
    dropped: list[str] = []
    for i, entry in enumerate(doc.get("stations", [])):
        label = f"station #{i} ({entry.get('id', '?')})"
        try:
            value = float(entry["value"])
            pollutant = str(entry["pollutant"])
            observed = float(entry["observed_at"])
            location = GeoPoint(float(entry["lat"]), float(entry["lon"]))
            if pollutant not in POLLUTANTS:
                raise ValueError(f"unknown pollutant {pollutant!r}")
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"value {value} not finite and non-negative")
            records.append(
                AirQualityReading(
                    station_id=str(entry["id"]),
                    location=location,
                    pollutant=pollutant,
                    value_ugm3=value,
                    observed_at=observed,
                    stale=now - observed > ttl_s,
                )
            )
        except (KeyError, TypeError, ValueError, NetworkError) as exc:
            dropped.append(f"{label}: {exc}")
    return FeedResult(records=records, dropped=dropped)
