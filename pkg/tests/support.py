"""Shared construction helpers for the test modules (not oracles)."""

from __future__ import annotations

from safemob.network import Detector, DetectorNetwork, GeoPoint, Link
from safemob.traffic import (
    BINS_PER_DAY,
    HistoricProfile,
    LinkState,
    TrafficSnapshot,
    comfort_index,
    congestion_ratio,
    window_start,
)


def make_net(node_ids, links) -> DetectorNetwork:
    dets = [Detector(i, i, GeoPoint(40.6, 22.9)) for i in node_ids]
    return DetectorNetwork(dets, [Link(a, b, length, speed) for a, b, length, speed in links])


def state_for(link: Link, ts: float, estimate: float, n: int) -> LinkState:
    ratio = congestion_ratio(link, estimate)
    return LinkState(
        link=link.key,
        window_start=window_start(ts),
        estimate_s=estimate,
        sample_count=n,
        congestion_ratio=ratio,
        comfort=comfort_index(ratio),
    )


class ConstantSnapshot(TrafficSnapshot):
    """Same LinkState at every timestamp; models time-invariant traffic."""

    def __init__(self, states_by_link):
        self._states = dict(states_by_link)

    def lookup(self, link, ts):
        return self._states.get(link)

    def states(self):
        return sorted(self._states.values(), key=lambda s: s.link)

    def __len__(self):
        return len(self._states)


def constant_profiles(estimates_by_link):
    """Historic estimate replicated over every day class and time bin."""
    profiles = {}
    for link_key, est in estimates_by_link.items():
        for dc in ("weekday", "weekend"):
            for tb in range(BINS_PER_DAY):
                profiles[(link_key, dc, tb)] = HistoricProfile(
                    link=link_key, day_class=dc, time_bin=tb, estimate_s=est, sample_count=4
                )
    return profiles
