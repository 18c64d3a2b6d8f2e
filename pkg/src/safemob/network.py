"""Detector network graph, geodesy helpers and static shortest paths."""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional

EARTH_RADIUS_M = 6_371_000.0


class NetworkError(ValueError):
    """Raised for malformed network documents or unknown detector references."""


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise NetworkError(f"non-finite coordinates ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise NetworkError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise NetworkError(f"longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class Detector:
    id: str
    name: str
    location: GeoPoint

    def __post_init__(self) -> None:
        if not self.id:
            raise NetworkError("detector id must be non-empty")


@dataclass(frozen=True)
class Link:
    from_id: str
    to_id: str
    length_m: float
    free_flow_kmh: float

    def __post_init__(self) -> None:
        if self.from_id == self.to_id:
            raise NetworkError(f"link {self.from_id}->{self.to_id}: self-loop not allowed")
        if not (math.isfinite(self.length_m) and self.length_m > 0):
            raise NetworkError(f"link {self.from_id}->{self.to_id}: non-positive length {self.length_m}")
        if not (math.isfinite(self.free_flow_kmh) and self.free_flow_kmh > 0):
            raise NetworkError(
                f"link {self.from_id}->{self.to_id}: non-positive free-flow speed {self.free_flow_kmh}"
            )

    @property
    def key(self) -> tuple[str, str]:
        return (self.from_id, self.to_id)

    @property
    def free_flow_time_s(self) -> float:
        """Uncongested traversal time in seconds."""
        return self.length_m / (self.free_flow_kmh / 3.6)


@dataclass(frozen=True)
class RoutePath:
    links: tuple[Link, ...]
    total_cost: float

    @property
    def node_ids(self) -> tuple[str, ...]:
        if not self.links:
            return ()
        return (self.links[0].from_id,) + tuple(l.to_id for l in self.links)


class DetectorNetwork:
    """Immutable directed detector graph; safe to share across threads after load."""

    def __init__(self, detectors: Iterable[Detector], links: Iterable[Link]):
        self.detectors: dict[str, Detector] = {}
        for det in detectors:
            if det.id in self.detectors:
                raise NetworkError(f"duplicate detector id {det.id!r}")
            self.detectors[det.id] = det

        self.links: list[Link] = []
        self._by_key: dict[tuple[str, str], Link] = {}
        self.adjacency: dict[str, list[Link]] = {d: [] for d in self.detectors}
        for link in links:
            for endpoint in (link.from_id, link.to_id):
                if endpoint not in self.detectors:
                    raise NetworkError(f"link {link.from_id}->{link.to_id}: unknown detector {endpoint!r}")
            if link.key in self._by_key:
                raise NetworkError(f"duplicate link {link.from_id}->{link.to_id}")
            self.links.append(link)
            self._by_key[link.key] = link
            self.adjacency[link.from_id].append(link)
        # deterministic expansion order helps the lexicographic tie-break
        for out in self.adjacency.values():
            out.sort(key=lambda l: l.to_id)

    def detector(self, detector_id: str) -> Detector:
        try:
            return self.detectors[detector_id]
        except KeyError:
            raise NetworkError(f"unknown detector {detector_id!r}") from None

    def link(self, from_id: str, to_id: str) -> Optional[Link]:
        return self._by_key.get((from_id, to_id))

    def __contains__(self, detector_id: str) -> bool:
        return detector_id in self.detectors

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DetectorNetwork):
            return NotImplemented
        return self.detectors == other.detectors and set(self.links) == set(other.links)


def load_network(doc: dict) -> DetectorNetwork:
    """Build a validated network from a parsed network document."""
    if not isinstance(doc, dict):
        raise NetworkError("network document must be a JSON object")
    detectors = []
    for i, entry in enumerate(doc.get("detectors", [])):
        try:
            detectors.append(
                Detector(
                    id=str(entry["id"]),
                    name=str(entry.get("name", entry["id"])),
                    location=GeoPoint(float(entry["lat"]), float(entry["lon"])),
                )
            )
        except KeyError as exc:
            raise NetworkError(f"detector #{i}: missing field {exc}") from None
    links = []
    for i, entry in enumerate(doc.get("links", [])):
        try:
            links.append(
                Link(
                    from_id=str(entry["from"]),
                    to_id=str(entry["to"]),
                    length_m=float(entry["length_m"]),
                    free_flow_kmh=float(entry["free_flow_kmh"]),
                )
            )
        except KeyError as exc:
            raise NetworkError(f"link #{i}: missing field {exc}") from None
    return DetectorNetwork(detectors, links)


def load_network_file(path: str | Path) -> DetectorNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NetworkError(f"{path}: {exc}") from None
    return load_network(doc)


def network_to_doc(net: DetectorNetwork) -> dict:
    """Inverse of load_network (round-trip safe)."""
    return {
        "detectors": [
            {"id": d.id, "name": d.name, "lat": d.location.lat, "lon": d.location.lon}
            for d in sorted(net.detectors.values(), key=lambda d: d.id)
        ],
        "links": [
            {"from": l.from_id, "to": l.to_id, "length_m": l.length_m, "free_flow_kmh": l.free_flow_kmh}
            for l in sorted(net.links, key=lambda l: l.key)
        ],
    }


def haversine(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters on the mean-radius sphere."""
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return EARTH_RADIUS_M * 2 * math.asin(min(1.0, math.sqrt(h)))


def initial_bearing(a: GeoPoint, b: GeoPoint) -> float:
    """Initial great-circle bearing from a to b, degrees in [0, 360)."""
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dlam = math.radians(b.lon - a.lon)
    y = math.sin(dlam) * math.cos(phi2)
    x = math.cos(phi1) * math.sin(phi2) - math.sin(phi1) * math.cos(phi2) * math.cos(dlam)
    return math.degrees(math.atan2(y, x)) % 360.0


def static_shortest_path(
    net: DetectorNetwork,
    from_id: str,
    to_id: str,
    cost: Callable[[Link], float],
) -> Optional[RoutePath]:
    """Minimal-cost directed path, or None when unreachable.

    Ties on total cost are broken by the lexicographically smallest
    detector-id sequence, so results are deterministic.
    """
    net.detector(from_id)
    net.detector(to_id)
    if from_id == to_id:
        return RoutePath(links=(), total_cost=0.0)

    # heap entries are (cost, node-id sequence, link sequence); the sequence
    # in the key makes equal-cost pops lexicographic
    heap: list[tuple[float, tuple[str, ...], tuple[Link, ...]]] = [(0.0, (from_id,), ())]
    settled: set[str] = set()
    while heap:
        total, nodes, links = heapq.heappop(heap)
        node = nodes[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == to_id:
            return RoutePath(links=links, total_cost=total)
        for link in net.adjacency[node]:
            if link.to_id in settled:
                continue
            step = cost(link)
            if not (math.isfinite(step) and step > 0):
                raise NetworkError(f"link {link.from_id}->{link.to_id}: cost must be finite and > 0, got {step}")
            heapq.heappush(heap, (total + step, nodes + (link.to_id,), links + (link,)))
    return None


def free_flow_path(net: DetectorNetwork, from_id: str, to_id: str) -> Optional[RoutePath]:
    """Shortest path under uncongested traversal times."""
    return static_shortest_path(net, from_id, to_id, lambda l: l.free_flow_time_s)
