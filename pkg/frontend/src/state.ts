// Application state and actions. Fetched data is stored exactly as the
// API returned it; failures clear the affected page so stale numbers are
// never shown next to an error banner.

import { ApiClient, AuthExpiredError } from "./api.js";
import type {
  DashboardResponse,
  RouteResponse,
  TrafficResponse,
  TripDetail,
  TripsResponse,
} from "./types.js";

export type Page = "Dashboard" | "PersonalTrips" | "Traffic" | "Routing";

export interface SessionModel {
  token: string;
  macIndex: number | null;
  from: string;
  to: string;
}

export interface RouteForm {
  origin: string;
  destination: string;
  depart: number;
  mode: "car" | "walk";
}

export interface ViewState {
  page: Page;
  session: SessionModel | null;
  loading: boolean;
  error: string | null;
  dashboard: DashboardResponse | null;
  trips: TripsResponse | null;
  tripDetail: TripDetail | null;
  traffic: TrafficResponse | null;
  routeForm: RouteForm;
  route: RouteResponse | null;
}

export const DEFAULT_RANGE = { from: "2018-08-06", to: "2018-08-28" };

export function initialState(): ViewState {
  return {
    page: "Dashboard",
    session: null,
    loading: false,
    error: null,
    dashboard: null,
    trips: null,
    tripDetail: null,
    traffic: null,
    routeForm: { origin: "", destination: "", depart: Math.floor(Date.now() / 1000), mode: "car" },
    route: null,
  };
}

export class App {
  state: ViewState = initialState();

  constructor(
    private api: ApiClient,
    private onChange: (state: ViewState) => void = () => {},
  ) {}

  private notify(): void {
    this.onChange(this.state);
  }

  private async guarded(action: () => Promise<void>, clearOnError: () => void): Promise<void> {
    this.state.loading = true;
    this.state.error = null;
    this.notify();
    try {
      await action();
    } catch (err) {
      clearOnError();
      if (err instanceof AuthExpiredError) {
        this.state.session = null;
        this.api.setToken(null);
        this.state.error = "Your session has expired; please log in again.";
      } else {
        this.state.error = err instanceof Error ? err.message : String(err);
      }
    } finally {
      this.state.loading = false;
      this.notify();
    }
  }

  async login(email: string, password: string): Promise<void> {
    await this.guarded(
      async () => {
        const out = await this.api.login(email, password);
        this.state.session = { token: out.token, macIndex: null, ...DEFAULT_RANGE };
        this.state.page = "Dashboard";
        await this.refreshCurrentPage();
      },
      () => {
        this.state.session = null;
      },
    );
  }

  logout(): void {
    this.state = initialState();
    this.api.setToken(null);
    this.notify();
  }

  setDateRange(from: string, to: string, macIndex: number | null): boolean {
    if (!this.state.session) return false;
    if (from > to) {
      this.state.error = `Date range is inverted: ${from} is after ${to}.`;
      this.notify();
      return false;
    }
    this.state.session.from = from;
    this.state.session.to = to;
    this.state.session.macIndex = macIndex;
    return true;
  }

  async showPage(page: Page): Promise<void> {
    this.state.page = page;
    this.state.error = null;
    await this.refreshCurrentPage();
  }

  async refreshCurrentPage(): Promise<void> {
    switch (this.state.page) {
      case "Dashboard":
        return this.loadDashboard();
      case "PersonalTrips":
        return this.loadTrips();
      case "Traffic":
        return this.loadTraffic();
      case "Routing":
        this.notify();
        return;
    }
  }

  async loadDashboard(): Promise<void> {
    const s = this.state.session;
    if (!s) return;
    await this.guarded(
      async () => {
        this.state.dashboard = await this.api.dashboard(s.from, s.to, s.macIndex);
      },
      () => {
        this.state.dashboard = null;
      },
    );
  }

  async loadTrips(): Promise<void> {
    const s = this.state.session;
    if (!s) return;
    await this.guarded(
      async () => {
        this.state.trips = await this.api.trips(s.from, s.to);
        this.state.tripDetail = null;
      },
      () => {
        this.state.trips = null;
        this.state.tripDetail = null;
      },
    );
  }

  async openTripDetail(id: string): Promise<void> {
    await this.guarded(
      async () => {
        this.state.tripDetail = await this.api.tripDetail(id);
      },
      () => {
        this.state.tripDetail = null;
      },
    );
  }

  closeTripDetail(): void {
    this.state.tripDetail = null;
    this.notify();
  }

  async loadTraffic(): Promise<void> {
    await this.guarded(
      async () => {
        this.state.traffic = await this.api.traffic();
      },
      () => {
        this.state.traffic = null;
      },
    );
  }

  async submitRoute(form: RouteForm): Promise<void> {
    this.state.routeForm = { ...form };
    await this.guarded(
      async () => {
        this.state.route = await this.api.route(form.origin, form.destination, form.depart, form.mode);
      },
      () => {
        this.state.route = null;
      },
    );
  }
}
