"""Intersection approach alerts from signal phase timelines and
pedestrian/queue presence."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .network import GeoPoint, haversine, initial_bearing

PHASE_GREEN = "Green"
PHASE_YELLOW = "Yellow"
PHASE_RED = "Red"

ALERT_RED_LIGHT = "RedLightAtArrival"
ALERT_QUEUE = "QueueAhead"
ALERT_PEDESTRIAN = "PedestrianCrossing"

SEVERITY_INFO = "Info"
SEVERITY_WARNING = "Warning"

# emission order: pedestrians first, then queues, then the signal itself
_ALERT_PRIORITY = {ALERT_PEDESTRIAN: 0, ALERT_QUEUE: 1, ALERT_RED_LIGHT: 2}


@dataclass(frozen=True)
class ApproachGate:
    """When a vehicle counts as approaching an intersection (invented defaults)."""

    radius_m: float = 150.0
    bearing_cone_deg: float = 45.0
    min_speed_ms: float = 1.0
    max_staleness_s: float = 30.0


DEFAULT_GATE = ApproachGate()


@dataclass(frozen=True)
class SpatMessage:
    intersection_id: str
    location: GeoPoint
    current_phase: str
    time_to_change_s: float
    phase_plan: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        if self.time_to_change_s < 0:
            raise ValueError("time_to_change must be >= 0")
        if not self.phase_plan:
            raise ValueError("phase plan must be non-empty")
        for name, duration in self.phase_plan:
            if duration <= 0:
                raise ValueError(f"phase {name}: duration must be positive")
        if self.current_phase not in {name for name, _ in self.phase_plan}:
            raise ValueError(f"current phase {self.current_phase!r} not in plan")

    @property
    def cycle_length_s(self) -> float:
        return sum(d for _, d in self.phase_plan)


@dataclass(frozen=True)
class IntersectionState:
    spat: SpatMessage
    pedestrian_present: bool
    queue_present: bool
    observed_at: float


@dataclass(frozen=True)
class VehicleApproach:
    position: GeoPoint
    speed_ms: float
    bearing_deg: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.speed_ms) and self.speed_ms >= 0):
            raise ValueError(f"speed must be finite and >= 0, got {self.speed_ms}")
        if not (0 <= self.bearing_deg < 360):
            raise ValueError(f"bearing must be in [0, 360), got {self.bearing_deg}")


@dataclass(frozen=True)
class Alert:
    intersection_id: str
    kind: str
    eta_s: float
    severity: str


def phase_at(spat: SpatMessage, offset: float) -> str:
    """Signal phase at `offset` seconds from now.

    The current phase holds until time_to_change, then the plan cycles from
    the entry after the current phase's first occurrence; boundaries belong
    to the next phase.
    """
    if offset < 0 or not math.isfinite(offset):
        raise ValueError(f"offset must be finite and >= 0, got {offset}")
    if offset < spat.time_to_change_s:
        return spat.current_phase
    rem = (offset - spat.time_to_change_s) % spat.cycle_length_s
    idx = next(i for i, (name, _) in enumerate(spat.phase_plan) if name == spat.current_phase)
    while True:
        idx = (idx + 1) % len(spat.phase_plan)
        name, duration = spat.phase_plan[idx]
        if rem < duration:
            return name
        rem -= duration


def _bearing_difference(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def is_approaching(vehicle: VehicleApproach, spat: SpatMessage, gate: ApproachGate = DEFAULT_GATE) -> bool:
    distance = haversine(vehicle.position, spat.location)
    if distance > gate.radius_m:
        return False
    if vehicle.speed_ms <= gate.min_speed_ms:
        return False
    toward = initial_bearing(vehicle.position, spat.location)
    return _bearing_difference(vehicle.bearing_deg, toward) <= gate.bearing_cone_deg


def evaluate_approach(
    vehicle: VehicleApproach,
    state: IntersectionState,
    now: float,
    gate: ApproachGate = DEFAULT_GATE,
) -> list[Alert]:
    """Alerts for one vehicle against one intersection; silent on stale data."""
    if now - state.observed_at > gate.max_staleness_s:
        return []
    spat = state.spat
    if not is_approaching(vehicle, spat, gate):
        return []
    eta = haversine(vehicle.position, spat.location) / vehicle.speed_ms
    alerts = []
    if state.pedestrian_present:
        alerts.append(Alert(spat.intersection_id, ALERT_PEDESTRIAN, eta, SEVERITY_WARNING))
    if state.queue_present:
        alerts.append(Alert(spat.intersection_id, ALERT_QUEUE, eta, SEVERITY_INFO))
    if phase_at(spat, eta) == PHASE_RED:
        alerts.append(Alert(spat.intersection_id, ALERT_RED_LIGHT, eta, SEVERITY_WARNING))
    alerts.sort(key=lambda a: _ALERT_PRIORITY[a.kind])
    return alerts


@dataclass
class AlertService:
    """Evaluates every configured intersection; counts stale silences."""

    intersections: list[IntersectionState] = field(default_factory=list)
    gate: ApproachGate = DEFAULT_GATE
    stale_dropped: int = 0

    def evaluate(self, vehicle: VehicleApproach, now: float) -> list[Alert]:
        out: list[Alert] = []
        for state in self.intersections:
            if now - state.observed_at > self.gate.max_staleness_s:
                self.stale_dropped += 1
                continue
            out.extend(evaluate_approach(vehicle, state, now, self.gate))
        return out


def load_intersections(path: str | Path, now: Optional[float] = None) -> list[IntersectionState]:
    """Read an intersection fixture document; null observed_at means 'now'."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    states = []
    for entry in doc.get("intersections", []):
        spat = SpatMessage(
            intersection_id=str(entry["id"]),
            location=GeoPoint(float(entry["lat"]), float(entry["lon"])),
            current_phase=entry["current_phase"],
            time_to_change_s=float(entry["time_to_change_s"]),
            phase_plan=tuple((p["phase"], float(p["duration_s"])) for p in entry["phase_plan"]),
        )
        observed = entry.get("observed_at")
        if observed is None:
            if now is None:
                raise ValueError(f"intersection {spat.intersection_id}: observed_at missing and no clock given")
            observed = now
        states.append(
            IntersectionState(
                spat=spat,
                pedestrian_present=bool(entry.get("pedestrian_present", False)),
                queue_present=bool(entry.get("queue_present", False)),
                observed_at=float(observed),
            )
        )
    return states
