// Acceptance: every number shown on the dashboard and personal-trips
// pages is the API's value verbatim (stubbed distinctive values).

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ABSENT, utcLabel } from "../src/format.js";
import { render } from "../src/render.js";
import { App } from "../src/state.js";
import { StubBackend, distinctiveData } from "./stubs.js";

let backend: StubBackend;
let app: App;

beforeEach(async () => {
  backend = new StubBackend(distinctiveData());
  app = new App(new ApiClient("http://stub", backend.fetch));
  await app.login("maria@example.org", "s3cret-pass");
});

describe("dashboard contract", () => {
  it("renders all six summary fields verbatim with units", async () => {
    await app.loadDashboard();
    const html = render(app.state);
    const s = backend.data.dashboard.summary;
    for (const value of [
      s.trip_count,
      s.checkin_count,
      s.total_distance_m,
      s.total_travel_time_s,
      s.avg_speed_kmh,
      s.avg_trip_distance_m,
    ]) {
      expect(html).toContain(String(value));
    }
    expect(html).toContain("km/h");
    expect(html).toMatch(/Total travel time/);
  });

  it("zero-trip summary shows zeros and an empty-state hint", async () => {
    backend.data.dashboard.summary = {
      trip_count: 0,
      checkin_count: 0,
      total_distance_m: 0,
      total_travel_time_s: 0,
      avg_speed_kmh: null,
      avg_trip_distance_m: null,
    };
    await app.loadDashboard();
    const html = render(app.state);
    expect(html).toContain("empty-state");
    expect(html).toContain(ABSENT); // absent averages, not fabricated zeros
  });
});

describe("personal trips contract", () => {
  it("renders one row per trip with all seven columns verbatim", async () => {
    await app.showPage("PersonalTrips");
    const html = render(app.state);
    const [full, degenerate] = backend.data.trips.trips;

    expect(html).toContain(utcLabel(full.date_time)); // Date & Time
    expect(html).toContain(full.origin); // Origin
    expect(html).toContain(full.destination); // Destination
    expect(html).toContain(String(full.trip_time_s)); // Trip Time
    expect(html).toContain(String(full.distance_m)); // Distance
    expect(html).toContain(String(full.est_speed_kmh)); // Est. Speed
    expect(html).toContain(String(full.comparison)); // Comparison

    // second row: absent values render as the em dash, never as 0
    expect(html).toContain(utcLabel(degenerate.date_time));
    expect(html).toContain(ABSENT);

    const rows = html.match(/<tr>\s*<td>/g) ?? [];
    expect(rows.length).toBe(2);

    // column headers in the documented order
    expect(html).toMatch(
      /Date &amp; Time<\/th><th>Origin<\/th><th>Destination<\/th>\s*<th>Trip Time<\/th><th>Distance<\/th><th>Est\. Speed<\/th><th>Comparison/,
    );
  });

  it("row click opens the detail view with the same values", async () => {
    await app.showPage("PersonalTrips");
    await app.openTripDetail("t-abc123def456");
    const html = render(app.state);
    expect(html).toContain("Trip t-abc123def456");
    expect(html).toContain(String(backend.data.tripDetails["t-abc123def456"].duration_s));
    expect(html).toContain("car");
  });

  it("zero trips shows the empty state", async () => {
    backend.data.trips = { trips: [] };
    await app.showPage("PersonalTrips");
    const html = render(app.state);
    expect(html).toContain("No trips recorded");
  });
});

describe("traffic contract", () => {
  it("renders link states verbatim with comfort color classes", async () => {
    await app.showPage("Traffic");
    const html = render(app.state);
    const [high, low] = backend.data.traffic.states;
    expect(html).toContain(String(high.estimate_s));
    expect(html).toContain(String(high.congestion_ratio));
    expect(html).toContain(String(low.estimate_s));
    expect(html).toContain('class="comfort-high"');
    expect(html).toContain('class="comfort-low"');
  });
});
