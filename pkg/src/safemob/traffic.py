"""Link travel-time estimation: sample extraction, robust windowed
aggregation, historic profiles and the congestion/comfort index."""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .ingest import DetectionEvent
from .network import DetectorNetwork, Link

WINDOW_S = 900.0  # 96 windows per day, aligned to the clock grid
MAX_PLAUSIBLE_KMH = 150.0  # urban/peri-urban speed cap for sample acceptance
MAD_SCALE = 1.4826  # consistency constant for normal data
MAD_CUTOFF = 3.0
BINS_PER_DAY = 96

COMFORT_HIGH = "High"
COMFORT_MEDIUM = "Medium"
COMFORT_LOW = "Low"
COMFORT_HIGH_MIN_RATIO = 0.75
COMFORT_MEDIUM_MIN_RATIO = 0.40

DAY_WEEKDAY = "weekday"
DAY_WEEKEND = "weekend"


@dataclass(frozen=True)
class TravelTimeSample:
    link: tuple[str, str]
    depart: float
    travel_time_s: float


@dataclass(frozen=True)
class LinkState:
    link: tuple[str, str]
    window_start: float
    estimate_s: float
    sample_count: int
    congestion_ratio: float
    comfort: str


@dataclass(frozen=True)
class HistoricProfile:
    link: tuple[str, str]
    day_class: str
    time_bin: int
    estimate_s: float
    sample_count: int


def window_start(ts: float) -> float:
    """Start of the 900 s window containing ts."""
    return ts - (ts % WINDOW_S)


def day_class(ts: float) -> str:
    """Weekday/weekend classification of a UTC timestamp."""
    dt = datetime.fromtimestamp(ts, tz=timezone.utc)
    return DAY_WEEKEND if dt.weekday() >= 5 else DAY_WEEKDAY


def time_bin(ts: float) -> int:
    """900 s time-of-day bin index, 0..95 (UTC)."""
    return int((ts % 86_400.0) // WINDOW_S)


def match_link_traversals(
    events: Sequence[DetectionEvent], net: DetectorNetwork
) -> tuple[list[TravelTimeSample], int]:
    """Pair consecutive check-ins over direct links into travel-time samples.

    Pairs implying speeds above MAX_PLAUSIBLE_KMH (or non-positive travel
    time) are dropped; the second return value counts those rejections.
    """
    samples: list[TravelTimeSample] = []
    rejected = 0
    for a, b in zip(events, events[1:]):
        if b.timestamp < a.timestamp:
            raise ValueError("events are not sorted by timestamp")
        link = net.link(a.detector_id, b.detector_id)
        if link is None:
            continue
        tt = b.timestamp - a.timestamp
        if tt <= 0:
            rejected += 1
            continue
        implied_kmh = (link.length_m / tt) * 3.6
        if implied_kmh > MAX_PLAUSIBLE_KMH:
            rejected += 1
            continue
        samples.append(TravelTimeSample(link.key, a.timestamp, tt))
    return samples, rejected


def robust_estimate(values: Sequence[float]) -> Optional[float]:
    """Mean of the values surviving a median/MAD gate; None for empty input.

    With MAD = 0 only values equal to the median survive, so a majority of
    identical readings fully suppresses any minority of outliers.
    """
    if not values:
        return None
    med = statistics.median(values)
    mad = statistics.median([abs(v - med) for v in values])
    if mad == 0:
        survivors = [v for v in values if v == med]
    else:
        cutoff = MAD_CUTOFF * MAD_SCALE * mad
        survivors = [v for v in values if abs(v - med) <= cutoff]
    return sum(survivors) / len(survivors)


def congestion_ratio(link: Link, estimate_s: float) -> float:
    """Current speed over free-flow speed; 1.0 means free-flowing."""
    current_ms = link.length_m / estimate_s
    free_flow_ms = link.free_flow_kmh / 3.6
    return current_ms / free_flow_ms


def comfort_index(ratio: float) -> str:
    if ratio >= COMFORT_HIGH_MIN_RATIO:
        return COMFORT_HIGH
    if ratio >= COMFORT_MEDIUM_MIN_RATIO:
        return COMFORT_MEDIUM
    return COMFORT_LOW


def aggregate_link_window(
    samples: Sequence[TravelTimeSample], link: Link, win_start: float
) -> Optional[LinkState]:
    """Robust LinkState for one link and one window; None without samples."""
    for s in samples:
        if s.link != link.key or window_start(s.depart) != win_start:
            raise ValueError(f"sample {s} outside link/window being aggregated")
    estimate = robust_estimate([s.travel_time_s for s in samples])
    if estimate is None:
        return None
    ratio = congestion_ratio(link, estimate)
    return LinkState(
        link=link.key,
        window_start=win_start,
        estimate_s=estimate,
        sample_count=len(samples),
        congestion_ratio=ratio,
        comfort=comfort_index(ratio),
    )


class TrafficSnapshot:
    """Immutable per-window LinkState lookup, swapped atomically by builders."""

    def __init__(self, states: Iterable[LinkState]):
        self._by_key: dict[tuple[str, str, float], LinkState] = {}
        for st in states:
            self._by_key[(st.link[0], st.link[1], st.window_start)] = st

    def lookup(self, link: tuple[str, str], ts: float) -> Optional[LinkState]:
        """State of the window containing ts, if any."""
        return self._by_key.get((link[0], link[1], window_start(ts)))

    def states(self) -> list[LinkState]:
        return sorted(self._by_key.values(), key=lambda s: (s.link, s.window_start))

    def __len__(self) -> int:
        return len(self._by_key)


def build_snapshot(samples: Sequence[TravelTimeSample], net: DetectorNetwork) -> TrafficSnapshot:
    """Aggregate all samples into per-(link, window) states."""
    buckets: dict[tuple[tuple[str, str], float], list[TravelTimeSample]] = {}
    for s in samples:
        buckets.setdefault((s.link, window_start(s.depart)), []).append(s)
    states = []
    for (link_key, win), bucket in buckets.items():
        link = net.link(*link_key)
        if link is None:
            continue
        state = aggregate_link_window(bucket, link, win)
        if state is not None:
            states.append(state)
    return TrafficSnapshot(states)


def build_historic_profiles(
    samples: Sequence[TravelTimeSample], net: DetectorNetwork
) -> dict[tuple[tuple[str, str], str, int], HistoricProfile]:
    """Bucket samples by (link, day class, time-of-day bin), robustly aggregated."""
    buckets: dict[tuple[tuple[str, str], str, int], list[float]] = {}
    for s in samples:
        if net.link(*s.link) is None:
            continue
        key = (s.link, day_class(s.depart), time_bin(s.depart))
        buckets.setdefault(key, []).append(s.travel_time_s)
    profiles = {}
    for key, values in buckets.items():
        estimate = robust_estimate(values)
        if estimate is None:
            continue
        link_key, dc, tb = key
        profiles[key] = HistoricProfile(
            link=link_key, day_class=dc, time_bin=tb, estimate_s=estimate, sample_count=len(values)
        )
    return profiles


def historic_lookup(
    profiles: dict[tuple[tuple[str, str], str, int], HistoricProfile],
    link: tuple[str, str],
    ts: float,
) -> Optional[HistoricProfile]:
    return profiles.get((link, day_class(ts), time_bin(ts)))


def snapshot_to_doc(snapshot: TrafficSnapshot) -> dict:
    return {
        "format": "safemob-traffic-snapshot",
        "version": 1,
        "states": [
            {
                "from": st.link[0],
                "to": st.link[1],
                "window_start": st.window_start,
                "estimate_s": st.estimate_s,
                "sample_count": st.sample_count,
                "congestion_ratio": st.congestion_ratio,
                "comfort": st.comfort,
            }
            for st in snapshot.states()
        ],
    }


def load_snapshot(path: str | Path) -> TrafficSnapshot:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    states = [
        LinkState(
            link=(d["from"], d["to"]),
            window_start=d["window_start"],
            estimate_s=d["estimate_s"],
            sample_count=d["sample_count"],
            congestion_ratio=d["congestion_ratio"],
            comfort=d["comfort"],
        )
        for d in doc["states"]
    ]
    return TrafficSnapshot(states)
