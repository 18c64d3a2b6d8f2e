// Pure view functions: ViewState in, HTML string out. Every interactive
// element is a native button/input/select/a so keyboard-only use works
// on all pages.

import { ABSENT, escapeHtml, utcLabel, verbatim } from "./format.js";
import type { ViewState } from "./state.js";
import type { RouteResult, TripDetail, TripRow } from "./types.js";

export const PAGES = ["Dashboard", "PersonalTrips", "Traffic", "Routing"] as const;

const PAGE_LABELS: Record<string, string> = {
  Dashboard: "Trips Dashboard",
  PersonalTrips: "Personal Trips",
  Traffic: "Traffic",
  Routing: "Routing",
};

function banner(state: ViewState): string {
  if (state.error) {
    return `<div class="banner error" role="alert">${escapeHtml(state.error)}</div>`;
  }
  if (state.loading) {
    return `<div class="banner loading" role="status">Loading&hellip;</div>`;
  }
  return "";
}

function nav(state: ViewState): string {
  const tabs = PAGES.map((p) => {
    const current = state.page === p ? ' aria-current="page"' : "";
    return `<button type="button" class="nav-tab" data-page="${p}"${current}>${PAGE_LABELS[p]}</button>`;
  }).join("");
  return `<nav aria-label="Services">${tabs}<button type="button" class="nav-tab" data-action="logout">Log out</button></nav>`;
}

function rangeControls(state: ViewState): string {
  const s = state.session!;
  return `
  <form class="range" data-form="range">
    <label>From <input type="date" name="from" value="${escapeHtml(s.from)}"></label>
    <label>To <input type="date" name="to" value="${escapeHtml(s.to)}"></label>
    <label>MAC # (blank = all)
      <input type="number" name="mac_index" min="0" step="1" value="${s.macIndex ?? ""}">
    </label>
    <button type="submit">Apply</button>
  </form>`;
}

export function renderLogin(state: ViewState): string {
  return `
  ${banner(state)}
  <h1>Safe Mobility</h1>
  <form data-form="login" class="login">
    <label>Email <input type="email" name="email" required autocomplete="username"></label>
    <label>Password <input type="password" name="password" required autocomplete="current-password"></label>
    <button type="submit">Log in</button>
  </form>
  <p class="hint">Accounts are created with <code>POST /register</code>; see the API docs.</p>`;
}

export function renderDashboard(state: ViewState): string {
  const d = state.dashboard;
  let body = "";
  if (d) {
    const s = d.summary;
    const rows: [string, string][] = [
      ["Trips", verbatim(s.trip_count)],
      ["Check-ins", verbatim(s.checkin_count)],
      ["Average speed", verbatim(s.avg_speed_kmh, "km/h")],
      ["Total distance", verbatim(s.total_distance_m, "m")],
      ["Total travel time", verbatim(s.total_travel_time_s, "s")],
      ["Average trip distance", verbatim(s.avg_trip_distance_m, "m")],
    ];
    const cells = rows
      .map(([label, value]) => `<div class="stat"><dt>${label}</dt><dd>${value}</dd></div>`)
      .join("");
    const empty =
      s.trip_count === 0
        ? `<p class="empty-state">No trips in this period yet. Check the date range and MAC selection.</p>`
        : "";
    body = `<dl class="stats">${cells}</dl>${empty}`;
  }
  return `${banner(state)}<h1>Trips Dashboard</h1>${rangeControls(state)}${body}`;
}

function tripRow(t: TripRow): string {
  return `
  <tr>
    <td><button type="button" class="linklike" data-trip-id="${escapeHtml(t.id)}">${utcLabel(t.date_time)}</button></td>
    <td>${escapeHtml(t.origin)}</td>
    <td>${escapeHtml(t.destination)}</td>
    <td>${verbatim(t.trip_time_s, "s")}</td>
    <td>${verbatim(t.distance_m, "m")}</td>
    <td>${verbatim(t.est_speed_kmh, "km/h")}</td>
    <td>${t.comparison === null ? ABSENT : verbatim(t.comparison)}</td>
  </tr>`;
}

function tripDetailPanel(t: TripDetail): string {
  const checkins = t.checkins
    .map((c) => `<li>${escapeHtml(c.detector_id)} at ${utcLabel(c.timestamp)}</li>`)
    .join("");
  return `
  <section class="detail" aria-label="Trip detail">
    <h2>Trip ${escapeHtml(t.id)}</h2>
    <p>${escapeHtml(t.origin)} → ${escapeHtml(t.destination)},
       mode ${t.mode === null ? ABSENT : escapeHtml(t.mode)}${t.unroutable ? " (unroutable)" : ""}</p>
    <p>Duration ${verbatim(t.duration_s, "s")}, distance ${verbatim(t.distance_m, "m")},
       est. speed ${verbatim(t.est_speed_kmh, "km/h")}</p>
    <ol class="checkins">${checkins}</ol>
    <button type="button" data-action="close-detail">Close</button>
  </section>`;
}

export function renderPersonalTrips(state: ViewState): string {
  const trips = state.trips?.trips;
  let table = "";
  if (trips) {
    table =
      trips.length === 0
        ? `<p class="empty-state">No trips recorded in this period.</p>`
        : `
    <table class="trips">
      <thead><tr>
        <th>Date &amp; Time</th><th>Origin</th><th>Destination</th>
        <th>Trip Time</th><th>Distance</th><th>Est. Speed</th><th>Comparison</th>
      </tr></thead>
      <tbody>${trips.map(tripRow).join("")}</tbody>
    </table>`;
  }
  const detail = state.tripDetail ? tripDetailPanel(state.tripDetail) : "";
  return `${banner(state)}<h1>Personal Trips</h1>${rangeControls(state)}${table}${detail}`;
}

export function renderTraffic(state: ViewState): string {
  const states = state.traffic?.states;
  let table = "";
  if (states) {
    table =
      states.length === 0
        ? `<p class="empty-state">No link measurements yet.</p>`
        : `
    <table class="traffic">
      <thead><tr>
        <th>Link</th><th>Window (UTC)</th><th>Travel time</th>
        <th>Samples</th><th>Speed ratio</th><th>Comfort</th>
      </tr></thead>
      <tbody>${states
        .map(
          (s) => `
        <tr class="comfort-${s.comfort.toLowerCase()}">
          <td>${escapeHtml(s.from)} → ${escapeHtml(s.to)}</td>
          <td>${utcLabel(s.window_start)}</td>
          <td>${verbatim(s.estimate_s, "s")}</td>
          <td>${verbatim(s.sample_count)}</td>
          <td>${verbatim(s.congestion_ratio)}</td>
          <td><span class="badge">${s.comfort}</span></td>
        </tr>`,
        )
        .join("")}</tbody>
    </table>`;
  }
  return `${banner(state)}<h1>Traffic</h1>${table}`;
}

function routeResultPanel(route: RouteResult | null): string {
  if (route === null) {
    return `<p class="empty-state" data-role="route-result">No route found between these detectors.</p>`;
  }
  const nodes =
    route.path.length === 0
      ? "(already there)"
      : [route.path[0][0], ...route.path.map(([, to]) => to)].map(escapeHtml).join(" → ");
  const legs = route.per_link
    .map(
      (leg) => `
      <tr>
        <td>${escapeHtml(leg.link[0])} → ${escapeHtml(leg.link[1])}</td>
        <td>${verbatim(leg.cost_seconds, "s")}</td>
        <td><span class="source source-${leg.cost_source}">${leg.cost_source}</span></td>
      </tr>`,
    )
    .join("");
  return `
  <section class="route" data-role="route-result" aria-label="Route result">
    <p class="route-path">${nodes}</p>
    <p>Total ${verbatim(route.total_time_s, "s")}, arriving ${utcLabel(route.arrive)}</p>
    <table class="legs">
      <thead><tr><th>Link</th><th>Cost</th><th>Source</th></tr></thead>
      <tbody>${legs}</tbody>
    </table>
  </section>`;
}

export function renderRouting(state: ViewState): string {
  const f = state.routeForm;
  const result = state.route ? routeResultPanel(state.route.route) : "";
  return `
  ${banner(state)}
  <h1>Routing</h1>
  <form data-form="route" class="route-form">
    <label>From detector <input type="text" name="origin" required value="${escapeHtml(f.origin)}"></label>
    <label>To detector <input type="text" name="destination" required value="${escapeHtml(f.destination)}"></label>
    <label>Depart (UTC epoch seconds)
      <input type="number" name="depart" step="1" required value="${f.depart}"></label>
    <label>Mode
      <select name="mode">
        <option value="car"${f.mode === "car" ? " selected" : ""}>Car</option>
        <option value="walk"${f.mode === "walk" ? " selected" : ""}>Walk</option>
      </select></label>
    <button type="submit">Find route</button>
  </form>
  ${result}`;
}

export function render(state: ViewState): string {
  if (!state.session) {
    return `<main>${renderLogin(state)}</main>`;
  }
  const page = {
    Dashboard: renderDashboard,
    PersonalTrips: renderPersonalTrips,
    Traffic: renderTraffic,
    Routing: renderRouting,
  }[state.page];
  return `${nav(state)}<main>${page(state)}</main>`;
}
