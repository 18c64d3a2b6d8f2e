// Response shapes exactly as documented in docs/api.md.

export interface DashboardSummary {
  trip_count: number;
  checkin_count: number;
  total_distance_m: number;
  total_travel_time_s: number;
  avg_speed_kmh: number | null;
  avg_trip_distance_m: number | null;
}

export interface DashboardResponse {
  from: string;
  to: string;
  summary: DashboardSummary;
}

export interface TripRow {
  id: string;
  date_time: number;
  origin: string;
  destination: string;
  trip_time_s: number;
  distance_m: number | null;
  est_speed_kmh: number | null;
  comparison: number | null;
}

export interface TripsResponse {
  trips: TripRow[];
}

export interface TripDetail extends Omit<TripRow, "date_time" | "trip_time_s" | "comparison"> {
  start: number;
  end: number;
  duration_s: number;
  mode: "walk" | "car" | null;
  unroutable: boolean;
  checkins: { detector_id: string; timestamp: number }[];
  links: [string, string][];
}

export interface LinkStateRow {
  from: string;
  to: string;
  window_start: number;
  estimate_s: number;
  sample_count: number;
  congestion_ratio: number;
  comfort: "High" | "Medium" | "Low";
}

export interface TrafficResponse {
  format: string;
  version: number;
  states: LinkStateRow[];
}

export type CostSource = "realtime" | "historic" | "freeflow";

export interface RoutePerLink {
  link: [string, string];
  cost_seconds: number;
  cost_source: CostSource;
}

export interface RouteResult {
  path: [string, string][];
  per_link: RoutePerLink[];
  total_time_s: number;
  depart: number;
  arrive: number;
}

export interface RouteResponse {
  route: RouteResult | null;
}

export interface LoginResponse {
  token: string;
  expires_in_s: number;
}

export interface ApiError {
  code: string;
  message: string;
}
