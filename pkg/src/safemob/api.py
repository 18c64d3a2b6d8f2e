"""HTTP/JSON service exposing registration, trips, traffic, routing,
alerts and external feeds."""

from __future__ import annotations

import hashlib
import time
from datetime import date, datetime, timezone
from datetime import time as dtime
from typing import Callable, Optional

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .alerts import AlertService, VehicleApproach, load_intersections
from .config import ApiConfig
from .feeds import FeedError, fetch_air_quality, fetch_parking
from .identity import AccountStore, AuthError, IdentityError, UserProfile
from .ingest import EventLog, IngestError, replay_csv
from .network import GeoPoint, NetworkError, load_network_file
from .routing import RouteRequest, RouteResult, route
from .traffic import build_historic_profiles, build_snapshot, match_link_traversals, snapshot_to_doc
from .trips import Trip, dashboard_summary, personal_trips, reconstruct_trips


class RegisterBody(BaseModel):
    email: str
    password: str
    macs: list[str]
    profile: dict


class LoginBody(BaseModel):
    email: str
    password: str


class RouteBody(BaseModel):
    origin: str
    destination: str
    depart: float
    mode: str = "car"


class ReplayBody(BaseModel):
    csv_path: str


class PlatformState:
    """Shared service state; mutated only by register/replay, read elsewhere."""

    def __init__(self, config: ApiConfig, clock: Callable[[], float] = time.time):
        self.config = config
        self.clock = clock
        self.net = load_network_file(config.network_path)
        self.accounts = AccountStore(config.accounts_path, config.mac_salt, config.encryption_key)
        self.log = EventLog(config.events_path)
        intersections = []
        if config.intersections_path is not None:
            intersections = load_intersections(config.intersections_path, now=clock())
        self.alerts = AlertService(intersections=intersections)
        self._traffic_cache_len = -1
        self._snapshot = None
        self._profiles = None
        if config.replay_csv_path is not None and len(self.log) == 0:
            replay_csv(config.replay_csv_path, self.net, self.log, config.mac_salt, clock=clock())

    def traffic_state(self):
        """Snapshot and historic profiles recomputed when the log has grown."""
        if self._traffic_cache_len != len(self.log):
            by_pseudonym: dict[str, list] = {}
            for e in self.log.events():
                by_pseudonym.setdefault(e.pseudonym, []).append(e)
            samples = []
            for events in by_pseudonym.values():
                events.sort(key=lambda e: (e.timestamp, e.detector_id))
                got, _ = match_link_traversals(events, self.net)
                samples.extend(got)
            self._snapshot = build_snapshot(samples, self.net)
            self._profiles = build_historic_profiles(samples, self.net)
            self._traffic_cache_len = len(self.log)
        return self._snapshot, self._profiles

    def user_trips(self, user_id: str, from_ts: float, to_ts: float, mac_index: Optional[int]) -> tuple[list[Trip], int]:
        pseudonyms = self.accounts.pseudonyms(user_id)
        if mac_index is not None:
            if not 0 <= mac_index < len(pseudonyms):
                raise IdentityError(f"mac_index {mac_index} out of range (account has {len(pseudonyms)} MACs)")
            pseudonyms = [pseudonyms[mac_index]]
        all_trips: list[Trip] = []
        singletons = 0
        for p in pseudonyms:
            events = self.log.query(p, from_ts, to_ts)
            trips, single = reconstruct_trips(events, self.net, self.config.gap_threshold_s)
            all_trips.extend(trips)
            singletons += single
        all_trips.sort(key=lambda t: t.start)
        return all_trips, singletons


def trip_id(trip: Trip) -> str:
    raw = f"{trip.pseudonym}:{trip.start!r}:{trip.end!r}"
    return "t-" + hashlib.sha1(raw.encode("ascii")).hexdigest()[:12]


def parse_iso_date_range(from_text: str, to_text: str) -> tuple[float, float]:
    """Inclusive ISO date range to a UTC timestamp interval."""
    try:
        d_from = date.fromisoformat(from_text)
        d_to = date.fromisoformat(to_text)
    except ValueError as exc:
        raise IngestError(f"bad date: {exc}") from None
    if d_from > d_to:
        raise IngestError(f"date range inverted: {from_text} > {to_text}")
    from_ts = datetime.combine(d_from, dtime.min, tzinfo=timezone.utc).timestamp()
    to_ts = datetime.combine(d_to, dtime.min, tzinfo=timezone.utc).timestamp() + 86_400.0 - 1e-6
    return from_ts, to_ts


def summary_to_json(summary) -> dict:
    return {
        "trip_count": summary.trip_count,
        "checkin_count": summary.checkin_count,
        "total_distance_m": summary.total_distance_m,
        "total_travel_time_s": summary.total_travel_time_s,
        "avg_speed_kmh": summary.avg_speed_kmh,
        "avg_trip_distance_m": summary.avg_trip_distance_m,
    }


def route_to_json(result: Optional[RouteResult]) -> Optional[dict]:
    if result is None:
        return None
    return {
        "path": [[a, b] for a, b in result.path],
        "per_link": [
            {"link": [lc.link[0], lc.link[1]], "cost_seconds": lc.cost_s, "cost_source": lc.source}
            for lc in result.per_link
        ],
        "total_time_s": result.total_time_s,
        "depart": result.depart,
        "arrive": result.arrive,
    }


def create_app(config: ApiConfig, clock: Callable[[], float] = time.time) -> FastAPI:
    state = PlatformState(config, clock)
    app = FastAPI(title="safemob", version=__version__)
    app.state.platform = state
    # the browser client is served from its own origin at desk scale
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"code": code, "message": message})

    @app.exception_handler(IdentityError)
    @app.exception_handler(IngestError)
    @app.exception_handler(NetworkError)
    @app.exception_handler(ValueError)
    async def _bad_request(_req: Request, exc: Exception):
        return error(400, "bad_request", str(exc))

    @app.exception_handler(AuthError)
    async def _unauthorized(_req: Request, _exc: AuthError):
        return error(401, "unauthorized", "invalid credentials")

    @app.exception_handler(FeedError)
    async def _feed_unavailable(_req: Request, exc: FeedError):
        return error(502, "feed_unavailable", str(exc))

    def current_user(authorization: Optional[str] = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise AuthError("missing bearer token")
        user_id = state.accounts.resolve_token(authorization.removeprefix("Bearer "), now=state.clock())
        if user_id is None:
            raise AuthError("invalid or expired token")
        return user_id

    @app.get("/health")
    def health():
        return {"status": "ok", "service": "safemob", "version": __version__, "time": state.clock()}

    @app.post("/register", status_code=201)
    def register(body: RegisterBody):
        profile_fields = dict(body.profile)
        if "date_of_birth" in profile_fields:
            profile_fields["date_of_birth"] = date.fromisoformat(profile_fields["date_of_birth"])
        try:
            profile = UserProfile(**profile_fields)
        except TypeError as exc:
            raise IdentityError(f"bad profile: {exc}") from None
        user_id = state.accounts.register_user(profile, body.macs, body.email, body.password)
        return {"user_id": user_id}

    @app.post("/login")
    def login(body: LoginBody):
        token = state.accounts.authenticate(body.email, body.password, now=state.clock())
        return {"token": token, "expires_in_s": 24 * 3600}

    @app.get("/dashboard")
    def dashboard(
        from_date: str = Query(alias="from"),
        to_date: str = Query(alias="to"),
        mac_index: Optional[int] = None,
        user_id: str = Depends(current_user),
    ):
        from_ts, to_ts = parse_iso_date_range(from_date, to_date)
        trips, singletons = state.user_trips(user_id, from_ts, to_ts, mac_index)
        summary = dashboard_summary(trips, singletons, (from_ts, to_ts))
        return {"from": from_date, "to": to_date, "summary": summary_to_json(summary)}

    @app.get("/trips")
    def trips_index(
        from_date: str = Query(alias="from"),
        to_date: str = Query(alias="to"),
        user_id: str = Depends(current_user),
    ):
        from_ts, to_ts = parse_iso_date_range(from_date, to_date)
        trips, _ = state.user_trips(user_id, from_ts, to_ts, None)
        snapshot, _profiles = state.traffic_state()

        def estimator(link, ts):
            st = snapshot.lookup(link.key, ts)
            return st.estimate_s if st else None

        rows = personal_trips(trips, estimator)
        return {
            "trips": [
                {
                    "id": trip_id(trip),
                    "date_time": row.date_time,
                    "origin": row.origin,
                    "destination": row.destination,
                    "trip_time_s": row.trip_time_s,
                    "distance_m": row.distance_m,
                    "est_speed_kmh": row.est_speed_kmh,
                    "comparison": row.comparison,
                }
                for trip, row in zip(trips, rows)
            ]
        }

    @app.get("/trips/{tid}")
    def trip_detail(tid: str, user_id: str = Depends(current_user)):
        trips, _ = state.user_trips(user_id, float("-inf"), float("inf"), None)
        for trip in trips:
            if trip_id(trip) == tid:
                return {
                    "id": tid,
                    "origin": trip.origin,
                    "destination": trip.destination,
                    "start": trip.start,
                    "end": trip.end,
                    "duration_s": trip.duration_s,
                    "distance_m": trip.distance_m,
                    "est_speed_kmh": trip.est_speed_kmh,
                    "mode": trip.mode,
                    "unroutable": trip.unroutable,
                    "checkins": [
                        {"detector_id": c.detector_id, "timestamp": c.timestamp} for c in trip.checkins
                    ],
                    "links": [[a, b] for a, b in (l.key for l in trip.links)],
                }
        return error(404, "not_found", f"no trip {tid} for this user")

    @app.get("/traffic")
    def traffic():
        snapshot, _profiles = state.traffic_state()
        return snapshot_to_doc(snapshot)

    @app.post("/route")
    def route_endpoint(body: RouteBody):
        snapshot, profiles = state.traffic_state()
        req = RouteRequest(body.origin, body.destination, body.depart, body.mode)
        result = route(req, state.net, snapshot, profiles)
        return {"route": route_to_json(result)}

    @app.get("/alerts")
    def alerts(lat: float, lon: float, speed: float, bearing: float):
        vehicle = VehicleApproach(GeoPoint(lat, lon), speed, bearing)
        found = state.alerts.evaluate(vehicle, now=state.clock())
        return {
            "alerts": [
                {
                    "intersection_id": a.intersection_id,
                    "kind": a.kind,
                    "eta_s": a.eta_s,
                    "severity": a.severity,
                }
                for a in found
            ],
            "evaluated": len(state.alerts.intersections),
            "stale_dropped": state.alerts.stale_dropped,
        }

    @app.get("/parking")
    def parking():
        if state.config.parking_source is None:
            return {"records": [], "dropped": [], "configured": False}
        result = fetch_parking(state.config.parking_source, now=state.clock())
        return {
            "configured": True,
            "records": [
                {
                    "facility_id": r.facility_id,
                    "name": r.name,
                    "lat": r.location.lat,
                    "lon": r.location.lon,
                    "capacity": r.capacity,
                    "free_spaces": r.free_spaces,
                    "observed_at": r.observed_at,
                    "stale": r.stale,
                }
                for r in result.records
            ],
            "dropped": result.dropped,
        }

    @app.get("/airquality")
    def airquality():
        if state.config.air_quality_source is None:
            return {"records": [], "dropped": [], "configured": False}
        result = fetch_air_quality(state.config.air_quality_source, now=state.clock())
        return {
            "configured": True,
            "records": [
                {
                    "station_id": r.station_id,
                    "lat": r.location.lat,
                    "lon": r.location.lon,
                    "pollutant": r.pollutant,
                    "value_ugm3": r.value_ugm3,
                    "observed_at": r.observed_at,
                    "stale": r.stale,
                }
                for r in result.records
            ],
            "dropped": result.dropped,
        }

    @app.post("/admin/replay")
    def replay(body: ReplayBody):
        ingested, rejects = replay_csv(
            body.csv_path, state.net, state.log, state.config.mac_salt, clock=state.clock()
        )
        return {"ingested": ingested, "rejected": rejects}

    return app


def serve(config: ApiConfig) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
