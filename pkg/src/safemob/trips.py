"""Trip reconstruction from check-in streams and per-user mobility metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .network import DetectorNetwork, Link, free_flow_path

GAP_THRESHOLD_S = 900.0  # split trips at gaps above 15 minutes
DUPLICATE_COLLAPSE_S = 60.0  # BT re-detection jitter window at one detector
WALK_SPEED_MAX_KMH = 7.0  # below this a trip is classified as walking

MODE_WALK = "walk"
MODE_CAR = "car"


class TripError(ValueError):
    pass


@dataclass(frozen=True)
class Checkin:
    detector_id: str
    timestamp: float


@dataclass
class Trip:
    pseudonym: str
    checkins: tuple[Checkin, ...]
    links: tuple[Link, ...]
    distance_m: Optional[float]
    duration_s: float
    est_speed_kmh: Optional[float]
    mode: Optional[str]
    unroutable: bool = False

    @property
    def origin(self) -> str:
        return self.checkins[0].detector_id

    @property
    def destination(self) -> str:
        return self.checkins[-1].detector_id

    @property
    def start(self) -> float:
        return self.checkins[0].timestamp

    @property
    def end(self) -> float:
        return self.checkins[-1].timestamp


@dataclass
class Segmentation:
    """Runs of check-ins split at time gaps; concatenated runs reproduce the input."""

    runs: list[list[Checkin]]

    @property
    def trip_runs(self) -> list[list[Checkin]]:
        return [r for r in self.runs if len(r) >= 2]

    @property
    def singletons(self) -> list[Checkin]:
        return [r[0] for r in self.runs if len(r) == 1]


@dataclass
class DashboardSummary:
    trip_count: int
    checkin_count: int
    total_distance_m: float
    total_travel_time_s: float
    avg_speed_kmh: Optional[float]
    avg_trip_distance_m: Optional[float]


@dataclass
class PersonalTripRow:
    date_time: float
    origin: str
    destination: str
    trip_time_s: float
    distance_m: Optional[float]
    est_speed_kmh: Optional[float]
    comparison: Optional[float]


def segment_trips(checkins: Sequence[Checkin], gap_threshold: float = GAP_THRESHOLD_S) -> Segmentation:
    """Split a time-ordered check-in sequence at every gap above the threshold."""
    if gap_threshold <= 0:
        raise TripError(f"gap threshold must be positive, got {gap_threshold}")
    runs: list[list[Checkin]] = []
    current: list[Checkin] = []
    for c in checkins:
        if current:
            if c.timestamp < current[-1].timestamp:
                raise TripError("check-ins are not sorted by timestamp")
            if c.timestamp - current[-1].timestamp > gap_threshold:
                runs.append(current)
                current = []
        current.append(c)
    if current:
        runs.append(current)
    return Segmentation(runs=runs)


def collapse_duplicates(checkins: Sequence[Checkin], window: float = DUPLICATE_COLLAPSE_S) -> list[Checkin]:
    """Drop re-detections at the same detector within the jitter window (keep the first)."""
    out: list[Checkin] = []
    for c in checkins:
        if (
            out
            and c.detector_id == out[-1].detector_id
            and c.timestamp - out[-1].timestamp <= window
        ):
            continue
        out.append(c)
    return out


def trip_metrics(checkins: Sequence[Checkin], net: DetectorNetwork, pseudonym: str) -> Trip:
    """Distance, duration, speed and mode for one run of check-ins.

    Distance sums free-flow shortest-path lengths between consecutive
    detectors; a disconnected pair marks the whole trip unroutable.
    """
    if len(checkins) < 2:
        raise TripError("a trip needs at least two check-ins")
    for prev, cur in zip(checkins, checkins[1:]):
        if cur.timestamp <= prev.timestamp:
            raise TripError("trip check-ins must be strictly time-ordered")
    duration = checkins[-1].timestamp - checkins[0].timestamp

    links: list[Link] = []
    distance = 0.0
    unroutable = False
    for a, b in zip(checkins, checkins[1:]):
        leg = free_flow_path(net, a.detector_id, b.detector_id)
        if leg is None:
            unroutable = True
            break
        links.extend(leg.links)
        distance += sum(l.length_m for l in leg.links)

    if unroutable:
        return Trip(
            pseudonym=pseudonym,
            checkins=tuple(checkins),
            links=(),
            distance_m=None,
            duration_s=duration,
            est_speed_kmh=None,
            mode=None,
            unroutable=True,
        )
    est_speed = (distance / 1000.0) / (duration / 3600.0)
    mode = MODE_WALK if est_speed < WALK_SPEED_MAX_KMH else MODE_CAR
    return Trip(
        pseudonym=pseudonym,
        checkins=tuple(checkins),
        links=tuple(links),
        distance_m=distance,
        duration_s=duration,
        est_speed_kmh=est_speed,
        mode=mode,
    )


def reconstruct_trips(
    events: Sequence,
    net: DetectorNetwork,
    gap_threshold: float = GAP_THRESHOLD_S,
) -> tuple[list[Trip], int]:
    """Full pipeline for one pseudonym's query result: dedupe, segment, measure.

    Returns the trips plus the count of leftover singleton check-ins.
    """
    pseudonym = events[0].pseudonym if events else ""
    checkins = [Checkin(e.detector_id, e.timestamp) for e in events]
    checkins.sort(key=lambda c: (c.timestamp, c.detector_id))
    # guard against exact-timestamp ties across detectors (keep the first)
    strict: list[Checkin] = []
    for c in checkins:
        if strict and c.timestamp == strict[-1].timestamp:
            continue
        strict.append(c)
    deduped = collapse_duplicates(strict)
    seg = segment_trips(deduped, gap_threshold)
    trips = [trip_metrics(run, net, pseudonym) for run in seg.trip_runs]
    return trips, len(seg.singletons)


def dashboard_summary(
    trips: Sequence[Trip],
    singleton_count: int,
    time_range: tuple[float, float],
) -> DashboardSummary:
    """Aggregate trip metrics for the dashboard.

    Average speed is distance-weighted (total distance over total time);
    unroutable trips count toward trip/check-in counts but contribute no
    distance or travel time.
    """
    lo, hi = time_range
    for t in trips:
        if t.start < lo or t.end > hi:
            raise TripError(f"trip at {t.start} outside requested range [{lo}, {hi}]")
    routable = [t for t in trips if not t.unroutable]
    total_distance = sum(t.distance_m for t in routable)
    total_time = sum(t.duration_s for t in routable)
    avg_speed = (total_distance / 1000.0) / (total_time / 3600.0) if total_time > 0 else None
    avg_trip_distance = total_distance / len(trips) if trips else None
    return DashboardSummary(
        trip_count=len(trips),
        checkin_count=sum(len(t.checkins) for t in trips) + singleton_count,
        total_distance_m=total_distance,
        total_travel_time_s=total_time,
        avg_speed_kmh=avg_speed,
        avg_trip_distance_m=avg_trip_distance,
    )


LinkEstimator = Callable[[Link, float], Optional[float]]


def personal_trips(trips: Sequence[Trip], link_estimate: Optional[LinkEstimator]) -> list[PersonalTripRow]:
    """Per-trip rows with the comparison against the network-average speed.

    The comparison divides the trip's estimated speed by the distance-weighted
    network speed over the same links (estimates looked up at trip start);
    it is absent when no link of the trip has network data.
    """
    rows = []
    for trip in trips:
        comparison = None
        if link_estimate is not None and not trip.unroutable and trip.est_speed_kmh is not None:
            covered_m = 0.0
            estimated_s = 0.0
            for link in trip.links:
                est = link_estimate(link, trip.start)
                if est is not None and est > 0:
                    covered_m += link.length_m
                    estimated_s += est
            if estimated_s > 0 and trip.est_speed_kmh is not None:
                network_kmh = (covered_m / 1000.0) / (estimated_s / 3600.0)
                if network_kmh > 0:
                    comparison = trip.est_speed_kmh / network_kmh
        rows.append(
            PersonalTripRow(
                date_time=trip.start,
                origin=trip.origin,
                destination=trip.destination,
                trip_time_s=trip.duration_s,
                distance_m=trip.distance_m,
                est_speed_kmh=trip.est_speed_kmh,
                comparison=comparison,
            )
        )
    return rows
