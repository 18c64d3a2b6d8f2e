import json
import math
import random

import pytest

from safemob.network import (
    Detector,
    DetectorNetwork,
    GeoPoint,
    Link,
    NetworkError,
    free_flow_path,
    haversine,
    initial_bearing,
    load_network,
    load_network_file,
    network_to_doc,
    static_shortest_path,
)

from oracles import best_static_cost, spherical_law_of_cosines_m


def make_net(node_ids, links):
    detectors = [Detector(i, i, GeoPoint(40.6, 22.9)) for i in node_ids]
    return DetectorNetwork(detectors, [Link(a, b, length, speed) for a, b, length, speed in links])


class TestGeoPoint:
    def test_valid(self):
        p = GeoPoint(40.64, 22.94)
        assert p.lat == 40.64

    @pytest.mark.parametrize("lat,lon", [(91, 0), (-91, 0), (0, 181), (0, -181), (float("nan"), 0)])
    def test_out_of_range(self, lat, lon):
        with pytest.raises(NetworkError):
            GeoPoint(lat, lon)


class TestLoadNetwork:
    def test_minimal_two_detectors_one_link(self):
        doc = {
            "detectors": [
                {"id": "A", "name": "Alpha", "lat": 40.6, "lon": 22.9},
                {"id": "B", "name": "Beta", "lat": 40.7, "lon": 22.95},
            ],
            "links": [{"from": "A", "to": "B", "length_m": 1200, "free_flow_kmh": 50}],
        }
        net = load_network(doc)
        assert len(net.detectors) == 2
        assert len(net.links) == 1
        assert net.link("A", "B").free_flow_time_s == pytest.approx(1200 / (50 / 3.6))

    def test_unknown_detector_reference(self):
        doc = {
            "detectors": [{"id": "A", "name": "A", "lat": 0, "lon": 0}],
            "links": [{"from": "A", "to": "X", "length_m": 100, "free_flow_kmh": 30}],
        }
        with pytest.raises(NetworkError, match="unknown detector"):
            load_network(doc)

    def test_duplicate_detector_id(self):
        doc = {
            "detectors": [
                {"id": "A", "name": "A", "lat": 0, "lon": 0},
                {"id": "A", "name": "A2", "lat": 1, "lon": 1},
            ],
            "links": [],
        }
        with pytest.raises(NetworkError, match="duplicate detector"):
            load_network(doc)

    def test_duplicate_link(self):
        with pytest.raises(NetworkError, match="duplicate link"):
            make_net("AB", [("A", "B", 100, 30), ("A", "B", 200, 30)])

    @pytest.mark.parametrize("length,speed", [(0, 30), (-5, 30), (100, 0), (100, -1)])
    def test_non_positive_length_or_speed(self, length, speed):
        with pytest.raises(NetworkError):
            Link("A", "B", length, speed)

    def test_bundled_default_has_40_detectors(self, networks_dir):
        net = load_network_file(networks_dir / "thessaloniki40.json")
        assert len(net.detectors) == 40

    def test_parse_failure(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(NetworkError):
            load_network_file(bad)

    def test_round_trip(self, networks_dir):
        net = load_network_file(networks_dir / "thessaloniki40.json")
        again = load_network(json.loads(json.dumps(network_to_doc(net))))
        assert again == net


class TestHaversine:
    def test_coincident_points(self):
        p = GeoPoint(40.64, 22.94)
        assert haversine(p, p) == 0.0

    def test_one_hundredth_degree_latitude(self):
        a, b = GeoPoint(40.64, 22.94), GeoPoint(40.65, 22.94)
        d = haversine(a, b)
        oracle = spherical_law_of_cosines_m(40.64, 22.94, 40.65, 22.94)
        assert d == pytest.approx(oracle, abs=0.01)
        assert d == pytest.approx(1112.0, abs=1.0)

    def test_symmetry_random_pairs(self):
        rng = random.Random(7)
        for _ in range(100):
            a = GeoPoint(rng.uniform(-89, 89), rng.uniform(-179, 179))
            b = GeoPoint(rng.uniform(-89, 89), rng.uniform(-179, 179))
            assert haversine(a, b) == haversine(b, a)

    def test_triangle_inequality_random_triples(self):
        rng = random.Random(11)
        for _ in range(200):
            pts = [GeoPoint(rng.uniform(-89, 89), rng.uniform(-179, 179)) for _ in range(3)]
            a, b, c = pts
            assert haversine(a, c) <= haversine(a, b) + haversine(b, c) + 1e-6


class TestBearing:
    def test_due_north(self):
        assert initial_bearing(GeoPoint(40.0, 22.9), GeoPoint(41.0, 22.9)) == pytest.approx(0.0, abs=1e-9)

    def test_due_east_at_equator(self):
        assert initial_bearing(GeoPoint(0.0, 10.0), GeoPoint(0.0, 11.0)) == pytest.approx(90.0, abs=1e-9)

    def test_range(self):
        rng = random.Random(3)
        for _ in range(50):
            a = GeoPoint(rng.uniform(-89, 89), rng.uniform(-179, 179))
            b = GeoPoint(rng.uniform(-89, 89), rng.uniform(-179, 179))
            assert 0.0 <= initial_bearing(a, b) < 360.0


class TestShortestPath:
    def test_identity(self):
        net = make_net("AB", [("A", "B", 100, 36)])
        path = static_shortest_path(net, "A", "A", lambda l: l.length_m)
        assert path.links == ()
        assert path.total_cost == 0.0

    def test_triangle_prefers_two_hop(self):
        # A->B 100, B->C 100, A->C 250 by length
        net = make_net("ABC", [("A", "B", 100, 36), ("B", "C", 100, 36), ("A", "C", 250, 36)])
        path = static_shortest_path(net, "A", "C", lambda l: l.length_m)
        oracle = best_static_cost(net, "A", "C", lambda l: l.length_m)
        assert path.total_cost == oracle == 200
        assert path.node_ids == ("A", "B", "C")

    def test_unreachable_returns_none(self):
        net = make_net("AB", [])
        assert static_shortest_path(net, "A", "B", lambda l: l.length_m) is None

    def test_unknown_detector(self):
        net = make_net("AB", [("A", "B", 100, 36)])
        with pytest.raises(NetworkError, match="unknown detector"):
            static_shortest_path(net, "A", "Z", lambda l: l.length_m)

    def test_matches_enumeration_on_random_graphs(self):
        rng = random.Random(42)
        for trial in range(30):
            n = rng.randint(2, 8)
            ids = [f"n{i}" for i in range(n)]
            links = []
            for a in ids:
                for b in ids:
                    if a != b and rng.random() < 0.35:
                        links.append((a, b, rng.uniform(50, 2000), rng.uniform(20, 60)))
            net = make_net(ids, links)
            src, dst = rng.sample(ids, 2)
            got = static_shortest_path(net, src, dst, lambda l: l.length_m)
            want = best_static_cost(net, src, dst, lambda l: l.length_m)
            if want is None:
                assert got is None
            else:
                assert got.total_cost == pytest.approx(want, rel=0, abs=1e-9)

    def test_equal_cost_tie_breaks_lexicographically(self):
        # two equal-cost routes A->B->D and A->C->D; B sorts before C
        net = make_net("ABCD", [("A", "B", 100, 36), ("B", "D", 100, 36),
                                ("A", "C", 100, 36), ("C", "D", 100, 36)])
        path = static_shortest_path(net, "A", "D", lambda l: l.length_m)
        assert path.node_ids == ("A", "B", "D")

    def test_non_positive_cost_rejected(self):
        net = make_net("AB", [("A", "B", 100, 36)])
        with pytest.raises(NetworkError, match="cost"):
            static_shortest_path(net, "A", "B", lambda l: 0.0)

    def test_free_flow_path_uses_time(self):
        # shorter in meters but much slower; time-based path takes the longer link
        net = make_net("ABC", [("A", "B", 500, 5), ("B", "C", 500, 5), ("A", "C", 1500, 60)])
        path = free_flow_path(net, "A", "C")
        assert path.node_ids == ("A", "C")
