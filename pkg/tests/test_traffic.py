import random

import pytest

from safemob.ingest import DetectionEvent
from safemob.network import Detector, DetectorNetwork, GeoPoint, Link
from safemob.traffic import (
    HistoricProfile,
    TravelTimeSample,
    aggregate_link_window,
    build_historic_profiles,
    build_snapshot,
    comfort_index,
    congestion_ratio,
    day_class,
    historic_lookup,
    load_snapshot,
    match_link_traversals,
    robust_estimate,
    snapshot_to_doc,
    time_bin,
    window_start,
)

MONDAY_0800 = 1_533_542_400.0  # 2018-08-06T08:00:00Z, a Monday
SATURDAY_0800 = 1_533_974_400.0  # 2018-08-11T08:00:00Z


@pytest.fixture
def net():
    dets = [Detector(i, i, GeoPoint(40.6, 22.9)) for i in "ABC"]
    links = [Link("A", "B", 2000, 50), Link("B", "C", 1000, 50)]
    return DetectorNetwork(dets, links)


class TestMatching:
    def test_single_event_no_samples(self, net):
        samples, rejected = match_link_traversals([DetectionEvent("A", "p", 0.0)], net)
        assert samples == [] and rejected == 0

    def test_adjacent_pair_yields_sample(self, net):
        events = [DetectionEvent("A", "p", 100.0), DetectionEvent("B", "p", 220.0)]
        samples, rejected = match_link_traversals(events, net)
        assert len(samples) == 1 and rejected == 0
        assert samples[0].travel_time_s == 120.0
        assert samples[0].link == ("A", "B")

    def test_implausible_speed_rejected(self, net):
        # 2000 m in 5 s is 1440 km/h
        events = [DetectionEvent("A", "p", 100.0), DetectionEvent("B", "p", 105.0)]
        samples, rejected = match_link_traversals(events, net)
        assert samples == [] and rejected == 1

    def test_non_adjacent_pair_ignored(self, net):
        events = [DetectionEvent("A", "p", 0.0), DetectionEvent("C", "p", 600.0)]
        samples, rejected = match_link_traversals(events, net)
        assert samples == [] and rejected == 0

    def test_plausibility_boundary(self, net):
        # exactly 150 km/h on a 2000 m link: 48 s
        events = [DetectionEvent("A", "p", 0.0), DetectionEvent("B", "p", 48.0)]
        samples, _ = match_link_traversals(events, net)
        assert len(samples) == 1


class TestRobustEstimate:
    def test_constant_input(self):
        assert robust_estimate([60.0] * 5) == 60.0

    def test_single_outlier_rejected(self):
        values = [60.0] * 9 + [600.0]
        assert robust_estimate(values) == 60.0

    def test_empty_absent(self):
        assert robust_estimate([]) is None

    def test_within_min_max(self):
        rng = random.Random(3)
        for _ in range(100):
            values = [rng.uniform(10, 600) for _ in range(rng.randint(1, 30))]
            est = robust_estimate(values)
            assert min(values) <= est <= max(values)

    def test_contamination_trials(self):
        rng = random.Random(99)
        ok = 0
        for _ in range(100):
            clean = [60.0 * (1 + rng.uniform(-0.05, 0.05)) for _ in range(18)]
            dirty = [300.0, 300.0]
            values = clean + dirty
            rng.shuffle(values)
            est = robust_estimate(values)
            if abs(est - 60.0) / 60.0 <= 0.05:
                ok += 1
        assert ok >= 99


class TestComfort:
    def test_free_flow_identity(self, net):
        link = net.link("A", "B")
        # free-flow traversal: 2000 m at 50 km/h = 144 s
        ratio = congestion_ratio(link, link.free_flow_time_s)
        assert ratio == pytest.approx(1.0)
        assert comfort_index(ratio) == "High"

    @pytest.mark.parametrize(
        "ratio,expected",
        [(1.0, "High"), (0.75, "High"), (0.74, "Medium"), (0.5, "Medium"), (0.40, "Medium"), (0.39, "Low")],
    )
    def test_threshold_table(self, ratio, expected):
        assert comfort_index(ratio) == expected

    def test_monotone_in_estimate(self, net):
        link = net.link("A", "B")
        order = {"High": 2, "Medium": 1, "Low": 0}
        prev = 3
        for est in (100, 144, 200, 300, 400, 600, 1000):
            level = order[comfort_index(congestion_ratio(link, est))]
            assert level <= prev
            prev = level


class TestAggregation:
    def test_constant_samples(self, net):
        link = net.link("A", "B")
        win = window_start(MONDAY_0800)
        samples = [TravelTimeSample(link.key, MONDAY_0800 + i, 60.0) for i in range(5)]
        state = aggregate_link_window(samples, link, win)
        assert state.estimate_s == 60.0
        assert state.sample_count == 5

    def test_outlier_filtered(self, net):
        link = net.link("A", "B")
        win = window_start(MONDAY_0800)
        tts = [60.0] * 9 + [600.0]
        samples = [TravelTimeSample(link.key, MONDAY_0800 + i, tt) for i, tt in enumerate(tts)]
        state = aggregate_link_window(samples, link, win)
        assert state.estimate_s == 60.0
        assert state.sample_count == 10

    def test_empty_absent(self, net):
        assert aggregate_link_window([], net.link("A", "B"), 0.0) is None

    def test_sample_outside_window_rejected(self, net):
        link = net.link("A", "B")
        samples = [TravelTimeSample(link.key, MONDAY_0800, 60.0)]
        with pytest.raises(ValueError):
            aggregate_link_window(samples, link, window_start(MONDAY_0800) + 900.0)


class TestSnapshot:
    def test_partition_every_sample_counted_once(self, net):
        rng = random.Random(8)
        samples = []
        for _ in range(300):
            link = net.link("A", "B") if rng.random() < 0.5 else net.link("B", "C")
            depart = MONDAY_0800 + rng.uniform(0, 3 * 900)
            samples.append(TravelTimeSample(link.key, depart, rng.uniform(60, 200)))
        snap = build_snapshot(samples, net)
        assert sum(st.sample_count for st in snap.states()) == len(samples)

    def test_lookup_by_timestamp(self, net):
        link = net.link("A", "B")
        samples = [TravelTimeSample(link.key, MONDAY_0800 + 10, 100.0)]
        snap = build_snapshot(samples, net)
        assert snap.lookup(link.key, MONDAY_0800 + 899).estimate_s == 100.0
        assert snap.lookup(link.key, MONDAY_0800 + 901) is None

    def test_export_round_trip(self, net, tmp_path):
        import json

        link = net.link("A", "B")
        samples = [TravelTimeSample(link.key, MONDAY_0800 + i, 100.0 + i) for i in range(4)]
        snap = build_snapshot(samples, net)
        path = tmp_path / "snapshot.json"
        path.write_text(json.dumps(snapshot_to_doc(snap)))
        again = load_snapshot(path)
        assert again.states() == snap.states()


class TestHistoricProfiles:
    def test_monday_morning_bin(self, net):
        link = net.link("A", "B")
        samples = [
            TravelTimeSample(link.key, MONDAY_0800 + 60, 100.0),
            TravelTimeSample(link.key, MONDAY_0800 + 120, 120.0),
        ]
        profiles = build_historic_profiles(samples, net)
        prof = profiles[(link.key, "weekday", 32)]
        assert prof.estimate_s == pytest.approx(110.0)
        assert prof.sample_count == 2

    def test_no_samples_empty(self, net):
        assert build_historic_profiles([], net) == {}

    def test_saturday_lands_in_weekend(self, net):
        link = net.link("A", "B")
        samples = [TravelTimeSample(link.key, SATURDAY_0800, 90.0)]
        profiles = build_historic_profiles(samples, net)
        assert {k[1] for k in profiles} == {"weekend"}
        assert historic_lookup(profiles, link.key, SATURDAY_0800 + 60).estimate_s == 90.0
        assert historic_lookup(profiles, link.key, MONDAY_0800) is None

    def test_day_class_and_bin_helpers(self):
        assert day_class(MONDAY_0800) == "weekday"
        assert day_class(SATURDAY_0800) == "weekend"
        assert time_bin(MONDAY_0800) == 32
        assert window_start(MONDAY_0800 + 123.4) == MONDAY_0800
