"""Pre-trip routing over the detector graph with live, historic and
free-flow cost tiers."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .network import DetectorNetwork, Link, NetworkError
from .traffic import HistoricProfile, TrafficSnapshot, historic_lookup

MODE_CAR = "car"
MODE_WALK = "walk"

SOURCE_REALTIME = "realtime"
SOURCE_HISTORIC = "historic"
SOURCE_FREEFLOW = "freeflow"

REALTIME_MIN_SAMPLES = 5  # below this the live estimate is anecdote, not signal
WALK_SPEED_KMH = 5.0

HistoricProfiles = dict[tuple[tuple[str, str], str, int], HistoricProfile]


@dataclass(frozen=True)
class RouteRequest:
    origin: str
    destination: str
    depart: float
    mode: str = MODE_CAR

    def __post_init__(self) -> None:
        if self.mode not in (MODE_CAR, MODE_WALK):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class LinkCost:
    link: tuple[str, str]
    cost_s: float
    source: str


@dataclass(frozen=True)
class RouteResult:
    path: tuple[tuple[str, str], ...]
    per_link: tuple[LinkCost, ...]
    total_time_s: float
    depart: float
    arrive: float

    @property
    def node_ids(self) -> tuple[str, ...]:
        if not self.path:
            return ()
        return (self.path[0][0],) + tuple(to for _, to in self.path)


def link_cost(
    link: Link,
    depart: float,
    snapshot: Optional[TrafficSnapshot],
    profiles: Optional[HistoricProfiles],
    mode: str = MODE_CAR,
    sources: Sequence[str] = (SOURCE_REALTIME, SOURCE_HISTORIC, SOURCE_FREEFLOW),
) -> LinkCost:
    """Traversal cost at a departure time, tagged with the tier that supplied it.

    Car costs walk the realtime -> historic -> freeflow chain (restricted to
    `sources` plus the freeflow floor); walking ignores traffic entirely.
    """
    if mode == MODE_WALK:
        return LinkCost(link.key, link.length_m / (WALK_SPEED_KMH / 3.6), SOURCE_FREEFLOW)
    if SOURCE_REALTIME in sources and snapshot is not None:
        state = snapshot.lookup(link.key, depart)
        if state is not None and state.sample_count >= REALTIME_MIN_SAMPLES:
            return LinkCost(link.key, state.estimate_s, SOURCE_REALTIME)
    if SOURCE_HISTORIC in sources and profiles:
        prof = historic_lookup(profiles, link.key, depart)
        if prof is not None:
            return LinkCost(link.key, prof.estimate_s, SOURCE_HISTORIC)
    return LinkCost(link.key, link.free_flow_time_s, SOURCE_FREEFLOW)


def route(
    req: RouteRequest,
    net: DetectorNetwork,
    snapshot: Optional[TrafficSnapshot] = None,
    profiles: Optional[HistoricProfiles] = None,
    sources: Sequence[str] = (SOURCE_REALTIME, SOURCE_HISTORIC, SOURCE_FREEFLOW),
) -> Optional[RouteResult]:
    """Earliest-arrival path from origin to destination, or None if unreachable.

    Nodes expand by earliest arrival and each link is priced at the arrival
    time at its tail (costs held constant within a window); equal arrivals
    tie-break on the lexicographically smallest detector-id sequence.
    """
    net.detector(req.origin)
    net.detector(req.destination)
    if req.origin == req.destination:
        return RouteResult(path=(), per_link=(), total_time_s=0.0, depart=req.depart, arrive=req.depart)

    heap: list[tuple[float, tuple[str, ...], tuple[LinkCost, ...]]] = [
        (req.depart, (req.origin,), ())
    ]
    settled: set[str] = set()
    while heap:
        arrival, nodes, costs = heapq.heappop(heap)
        node = nodes[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == req.destination:
            return RouteResult(
                path=tuple(c.link for c in costs),
                per_link=costs,
                total_time_s=arrival - req.depart,
                depart=req.depart,
                arrive=arrival,
            )
        for link in net.adjacency[node]:
            if link.to_id in settled:
                continue
            lc = link_cost(link, arrival, snapshot, profiles, req.mode, sources)
            if not (math.isfinite(lc.cost_s) and lc.cost_s > 0):
                raise NetworkError(f"link {link.from_id}->{link.to_id}: bad cost {lc.cost_s}")
            heapq.heappush(heap, (arrival + lc.cost_s, nodes + (link.to_id,), costs + (lc,)))
    return None


def compare_routes(
    req: RouteRequest,
    net: DetectorNetwork,
    snapshot: Optional[TrafficSnapshot] = None,
    profiles: Optional[HistoricProfiles] = None,
) -> dict[str, Optional[RouteResult]]:
    """The same request routed once per cost tier (each falling back to freeflow)."""
    return {
        SOURCE_REALTIME: route(req, net, snapshot, None, sources=(SOURCE_REALTIME, SOURCE_FREEFLOW)),
        SOURCE_HISTORIC: route(req, net, None, profiles, sources=(SOURCE_HISTORIC, SOURCE_FREEFLOW)),
        SOURCE_FREEFLOW: route(req, net, None, None, sources=(SOURCE_FREEFLOW,)),
    }
