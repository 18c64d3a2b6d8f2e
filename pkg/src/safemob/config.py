"""Service configuration loading and validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .identity import MIN_SALT_BYTES


class ConfigError(ValueError):
    pass


@dataclass
class ApiConfig:
    network_path: Path
    data_dir: Path
    mac_salt: bytes
    encryption_key: bytes
    gap_threshold_s: float = 900.0
    parking_source: Optional[str] = None
    air_quality_source: Optional[str] = None
    intersections_path: Optional[Path] = None
    replay_csv_path: Optional[Path] = None  # detections replayed once at startup
    host: str = "127.0.0.1"
    port: int = 8000

    def __post_init__(self) -> None:
        self.network_path = Path(self.network_path)
        self.data_dir = Path(self.data_dir)
        if not self.network_path.exists():
            raise ConfigError(f"network document {self.network_path} does not exist")
        if len(self.mac_salt) < MIN_SALT_BYTES:
            raise ConfigError(f"mac_salt must be at least {MIN_SALT_BYTES} bytes")
        if not self.encryption_key:
            raise ConfigError("encryption_key must be non-empty")
        if self.gap_threshold_s <= 0:
            raise ConfigError("gap_threshold_s must be positive")
        for label, p in (
            ("parking feed", self.parking_source),
            ("air quality feed", self.air_quality_source),
        ):
            if p and not str(p).startswith(("http://", "https://")) and not Path(p).exists():
                raise ConfigError(f"{label} {p} does not exist")
        if self.intersections_path is not None:
            self.intersections_path = Path(self.intersections_path)
            if not self.intersections_path.exists():
                raise ConfigError(f"intersections fixture {self.intersections_path} does not exist")
        if self.replay_csv_path is not None:
            self.replay_csv_path = Path(self.replay_csv_path)
            if not self.replay_csv_path.exists():
                raise ConfigError(f"replay CSV {self.replay_csv_path} does not exist")
        self.data_dir.mkdir(parents=True, exist_ok=True)

    @property
    def accounts_path(self) -> Path:
        return self.data_dir / "accounts.json"

    @property
    def events_path(self) -> Path:
        return self.data_dir / "events.log"


def load_config(path: str | Path) -> ApiConfig:
    base = Path(path).resolve().parent
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None

    def resolve(p: Optional[str]) -> Optional[str]:
        if p is None or str(p).startswith(("http://", "https://")):
            return p
        return str((base / p).resolve())

    try:
        feeds = doc.get("feeds", {})
        bind = doc.get("bind", {})
        return ApiConfig(
            network_path=resolve(doc["network"]),
            data_dir=resolve(doc.get("data_dir", "data")),
            mac_salt=bytes.fromhex(doc["mac_salt_hex"]),
            encryption_key=bytes.fromhex(doc["encryption_key_hex"]),
            gap_threshold_s=float(doc.get("gap_threshold_s", 900.0)),
            parking_source=resolve(feeds.get("parking")),
            air_quality_source=resolve(feeds.get("air_quality")),
            intersections_path=resolve(doc.get("intersections")),
            replay_csv_path=resolve(doc.get("replay_csv")),
            host=bind.get("host", "127.0.0.1"),
            port=int(bind.get("port", 8000)),
        )
    except KeyError as exc:
        raise ConfigError(f"config missing field {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
