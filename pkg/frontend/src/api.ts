// Thin typed client over the platform's HTTP contract (docs/api.md).
// All data shown in the UI flows through here untouched.

import type {
  DashboardResponse,
  LoginResponse,
  RouteResponse,
  TrafficResponse,
  TripDetail,
  TripsResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class AuthExpiredError extends Error {
  constructor() {
    super("session expired");
  }
}

export class ApiRequestError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

async function parseError(resp: Response): Promise<never> {
  let code = "error";
  let message = `request failed with status ${resp.status}`;
  try {
    const body = await resp.json();
    if (body && typeof body.message === "string") {
      code = body.code ?? code;
      message = body.message;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  if (resp.status === 401) throw new AuthExpiredError();
  throw new ApiRequestError(resp.status, code, message);
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
    private token: string | null = null,
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private headers(json: boolean): Record<string, string> {
    const h: Record<string, string> = {};
    if (json) h["content-type"] = "application/json";
    if (this.token) h["authorization"] = `Bearer ${this.token}`;
    return h;
  }

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, { headers: this.headers(false) });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(body),
    });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as T;
  }

  async login(email: string, password: string): Promise<LoginResponse> {
    const out = await this.post<LoginResponse>("/login", { email, password });
    this.token = out.token;
    return out;
  }

  dashboard(from: string, to: string, macIndex: number | null): Promise<DashboardResponse> {
    const params = new URLSearchParams({ from, to });
    if (macIndex !== null) params.set("mac_index", String(macIndex));
    return this.get(`/dashboard?${params}`);
  }

  trips(from: string, to: string): Promise<TripsResponse> {
    const params = new URLSearchParams({ from, to });
    return this.get(`/trips?${params}`);
  }

  tripDetail(id: string): Promise<TripDetail> {
    return this.get(`/trips/${encodeURIComponent(id)}`);
  }

  traffic(): Promise<TrafficResponse> {
    return this.get("/traffic");
  }

  route(origin: string, destination: string, depart: number, mode: "car" | "walk"): Promise<RouteResponse> {
    return this.post("/route", { origin, destination, depart, mode });
  }
}
