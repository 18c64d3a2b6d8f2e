"""Deterministic vehicle simulator producing detection streams and ground truth.

Stands in for the live detector deployment: seeded demand drives vehicles
along free-flow shortest paths, each detector passage emits a detection
with a configurable probability, and the exact per-link timings are kept
as the oracle for trip reconstruction and travel-time estimation.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .network import DetectorNetwork, free_flow_path
from .traffic import window_start


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class OdPair:
    origin: str
    destination: str
    trips_per_hour: float


@dataclass
class DemandSpec:
    od_pairs: list[OdPair]
    period_start: float
    period_end: float
    speed_factor_range: tuple[float, float] = (0.6, 1.1)
    detection_probability: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.period_end <= self.period_start:
            raise SimulationError("demand period is empty")
        lo, hi = self.speed_factor_range
        if not (0 < lo <= hi):
            raise SimulationError(f"bad speed factor range [{lo}, {hi}]")
        if not 0.0 <= self.detection_probability <= 1.0:
            raise SimulationError(f"detection probability {self.detection_probability} outside [0, 1]")


# (from,to) -> {window_start -> slowdown factor >= 1}
CongestionScenario = dict[tuple[str, str], dict[float, float]]


def slowdown_factor(scenario: Optional[CongestionScenario], link_key: tuple[str, str], ts: float) -> float:
    if not scenario:
        return 1.0
    by_window = scenario.get(link_key)
    if not by_window:
        return 1.0
    return by_window.get(window_start(ts), 1.0)


@dataclass(frozen=True)
class DetectionRow:
    detector_id: str
    mac: str
    timestamp: float


@dataclass
class GroundTruthTrip:
    mac: str
    departure: float
    path: list[tuple[str, str]]
    node_times: list[tuple[str, float]]  # detector passage times, strictly increasing

    @property
    def duration_s(self) -> float:
        return self.node_times[-1][1] - self.node_times[0][1]

    @property
    def origin(self) -> str:
        return self.node_times[0][0]

    @property
    def destination(self) -> str:
        return self.node_times[-1][0]


@dataclass
class SimulationResult:
    detections: list[DetectionRow]
    ground_truth: list[GroundTruthTrip]
    seed: int


def _random_mac(rng: random.Random, used: set[str]) -> str:
    """Locally-administered unicast MAC, unique within the run."""
    while True:
        octets = [rng.randrange(256) for _ in range(6)]
        octets[0] = (octets[0] | 0x02) & 0xFE
        mac = ":".join(f"{o:02x}" for o in octets)
        if mac not in used:
            used.add(mac)
            return mac


def simulate(
    net: DetectorNetwork,
    demand: DemandSpec,
    congestion: Optional[CongestionScenario] = None,
) -> SimulationResult:
    """Run the demand over the network; fully deterministic for a given seed."""
    rng = random.Random(demand.seed)
    hours = (demand.period_end - demand.period_start) / 3600.0

    # resolve paths up front so unreachable pairs fail before any draw
    paths = {}
    for od in demand.od_pairs:
        path = free_flow_path(net, od.origin, od.destination)
        if path is None or not path.links:
            raise SimulationError(f"OD pair {od.origin}->{od.destination} is unreachable")
        paths[(od.origin, od.destination)] = path

    used_macs: set[str] = set()
    ground_truth: list[GroundTruthTrip] = []
    detections: list[DetectionRow] = []
    for od in demand.od_pairs:
        n_trips = round(od.trips_per_hour * hours)
        if n_trips <= 0:
            continue
        headway = (demand.period_end - demand.period_start) / n_trips
        path = paths[(od.origin, od.destination)]
        for i in range(n_trips):
            mac = _random_mac(rng, used_macs)
            jitter = rng.uniform(-0.25, 0.25) * headway
            depart = demand.period_start + (i + 0.5) * headway + jitter
            speed_factor = rng.uniform(*demand.speed_factor_range)
            t = depart
            node_times = [(path.links[0].from_id, t)]
            for link in path.links:
                traversal = link.free_flow_time_s / speed_factor
                traversal *= slowdown_factor(congestion, link.key, t)
                t += traversal
                node_times.append((link.to_id, t))
            ground_truth.append(
                GroundTruthTrip(
                    mac=mac,
                    departure=depart,
                    path=[l.key for l in path.links],
                    node_times=node_times,
                )
            )
            for detector_id, ts in node_times:
                if rng.random() < demand.detection_probability:
                    detections.append(DetectionRow(detector_id, mac, ts))

    detections.sort(key=lambda d: (d.timestamp, d.detector_id, d.mac))
    return SimulationResult(detections=detections, ground_truth=ground_truth, seed=demand.seed)


def write_outputs(result: SimulationResult, out_dir: str | Path) -> tuple[Path, Path]:
    """Write detections.csv and ground_truth.json; byte-stable for a given result."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "detections.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["detector_id", "mac", "timestamp"])
        for d in result.detections:
            writer.writerow([d.detector_id, d.mac, repr(d.timestamp)])
    truth_path = out / "ground_truth.json"
    doc = {
        "seed": result.seed,
        "trips": [
            {
                "mac": t.mac,
                "departure": t.departure,
                "path": [[a, b] for a, b in t.path],
                "node_times": [[det, ts] for det, ts in t.node_times],
            }
            for t in result.ground_truth
        ],
    }
    truth_path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return csv_path, truth_path


def load_demand(path: str | Path) -> DemandSpec:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        return DemandSpec(
            od_pairs=[
                OdPair(str(p["origin"]), str(p["destination"]), float(p["trips_per_hour"]))
                for p in doc["od_pairs"]
            ],
            period_start=float(doc["period"]["start"]),
            period_end=float(doc["period"]["end"]),
            speed_factor_range=tuple(doc.get("speed_factor_range", (0.6, 1.1))),
            detection_probability=float(doc.get("detection_probability", 1.0)),
            seed=int(doc.get("seed", 0)),
        )
    except KeyError as exc:
        raise SimulationError(f"demand document missing field {exc}") from None


def load_congestion(path: str | Path) -> CongestionScenario:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    scenario: CongestionScenario = {}
    for entry in doc.get("slowdowns", []):
        key = (str(entry["from"]), str(entry["to"]))
        factor = float(entry["factor"])
        if factor < 1.0:
            raise SimulationError(f"slowdown factor {factor} below 1.0 for {key}")
        scenario.setdefault(key, {})[float(entry["window_start"])] = factor
    return scenario
