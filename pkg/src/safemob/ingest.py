"""Append-only detection event log with pseudonymization at the door."""

from __future__ import annotations

import csv
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path

from .identity import IdentityError, pseudonymize_mac
from .network import DetectorNetwork

CLOCK_SKEW_S = 60.0
LOG_HEADER = {"format": "safemob-events", "version": 1}


class IngestError(ValueError):
    """Invalid detection record or query."""


@dataclass(frozen=True)
class RawDetection:
    detector_id: str
    mac: str
    timestamp: float


@dataclass(frozen=True)
class DetectionEvent:
    detector_id: str
    pseudonym: str
    timestamp: float


class EventLog:
    """Versioned newline-delimited log; single writer, concurrent readers.

    Events are kept in memory in append order and re-read from disk on open,
    so a restarted process sees exactly the flushed prefix.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._events: list[DetectionEvent] = []
        if self.path.exists():
            self._read_existing()
            self._fh = open(self.path, "a", encoding="utf-8")
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = open(self.path, "w", encoding="utf-8")
            self._fh.write(json.dumps(LOG_HEADER) + "\n")
            self._fh.flush()

    def _read_existing(self) -> None:
        with open(self.path, "r", encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header.get("format") != LOG_HEADER["format"]:
                raise IngestError(f"{self.path}: not an event log (header {header!r})")
            if header.get("version") != LOG_HEADER["version"]:
                raise IngestError(f"{self.path}: unsupported log version {header.get('version')}")
            for line in fh:
                if not line.strip():
                    continue
                d = json.loads(line)
                self._events.append(DetectionEvent(d["detector_id"], d["pseudonym"], d["ts"]))

    def append(self, event: DetectionEvent) -> None:
        line = json.dumps(
            {"detector_id": event.detector_id, "pseudonym": event.pseudonym, "ts": event.timestamp}
        )
        with self._lock:
            self._fh.write(line + "\n")
            self._fh.flush()
            self._events.append(event)

    def flush(self) -> None:
        with self._lock:
            self._fh.flush()
            os.fsync(self._fh.fileno())

    def close(self) -> None:
        self._fh.close()

    def __len__(self) -> int:
        return len(self._events)

    def events(self) -> list[DetectionEvent]:
        """All events in ingest order."""
        return list(self._events)

    def query(self, pseudonym: str, from_ts: float, to_ts: float) -> list[DetectionEvent]:
        """Events for one pseudonym with from_ts <= t <= to_ts, time-ascending."""
        if from_ts > to_ts:
            raise IngestError(f"query range inverted: {from_ts} > {to_ts}")
        hits = [
            e for e in self._events
            if e.pseudonym == pseudonym and from_ts <= e.timestamp <= to_ts
        ]
        hits.sort(key=lambda e: (e.timestamp, e.detector_id))
        return hits


def ingest_detection(
    raw: RawDetection,
    net: DetectorNetwork,
    log: EventLog,
    mac_salt: bytes,
    clock: float,
) -> DetectionEvent:
    """Validate, pseudonymize and persist one raw detection.

    The raw MAC is discarded here; only its pseudonym travels further.
    """
    if raw.detector_id not in net:
        raise IngestError(f"unknown detector {raw.detector_id!r}")
    try:
        pseudonym = pseudonymize_mac(raw.mac, mac_salt)
    except IdentityError as exc:
        raise IngestError(str(exc)) from None
    if raw.timestamp > clock + CLOCK_SKEW_S:
        raise IngestError(
            f"future timestamp {raw.timestamp} rejected ({raw.timestamp - clock:.0f}s ahead of clock)"
        )
    event = DetectionEvent(raw.detector_id, pseudonym, raw.timestamp)
    log.append(event)
    return event


def replay_csv(
    csv_path: str | Path,
    net: DetectorNetwork,
    log: EventLog,
    mac_salt: bytes,
    clock: float,
) -> tuple[int, list[str]]:
    """Bulk-ingest a detector_id,mac,timestamp CSV; returns (ingested, rejects)."""
    ingested = 0
    rejects: list[str] = []
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row:
                continue
            if lineno == 1 and row[0].strip().lower() == "detector_id":
                continue  # header row
            if len(row) != 3:
                rejects.append(f"line {lineno}: expected 3 columns, got {len(row)}")
                continue
            detector_id, mac, ts_text = (c.strip() for c in row)
            try:
                raw = RawDetection(detector_id, mac, float(ts_text))
            except ValueError:
                rejects.append(f"line {lineno}: bad timestamp {ts_text!r}")
                continue
            try:
                ingest_detection(raw, net, log, mac_salt, clock)
            except IngestError as exc:
                rejects.append(f"line {lineno}: {exc}")
                continue
            ingested += 1
    log.flush()
    return ingested, rejects
