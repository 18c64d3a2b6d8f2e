// DOM wiring: renders the view into #app and funnels events to App actions.

import { ApiClient } from "./api.js";
import { render } from "./render.js";
import { App, type Page } from "./state.js";

declare global {
  interface Window {
    SAFEMOB_API_BASE?: string;
  }
}

const API_BASE = window.SAFEMOB_API_BASE ?? "http://127.0.0.1:8000";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const app = new App(new ApiClient(API_BASE), (state) => {
  root.innerHTML = render(state);
});

root.innerHTML = render(app.state);

root.addEventListener("click", (ev) => {
  const target = ev.target as HTMLElement;
  const pageButton = target.closest<HTMLElement>("[data-page]");
  if (pageButton) {
    void app.showPage(pageButton.dataset.page as Page);
    return;
  }
  const tripButton = target.closest<HTMLElement>("[data-trip-id]");
  if (tripButton) {
    void app.openTripDetail(tripButton.dataset.tripId!);
    return;
  }
  const action = target.closest<HTMLElement>("[data-action]");
  if (action?.dataset.action === "logout") app.logout();
  if (action?.dataset.action === "close-detail") app.closeTripDetail();
});

root.addEventListener("submit", (ev) => {
  const form = ev.target as HTMLFormElement;
  ev.preventDefault();
  const data = new FormData(form);
  switch (form.dataset.form) {
    case "login":
      void app.login(String(data.get("email")), String(data.get("password")));
      break;
    case "range": {
      const macRaw = String(data.get("mac_index") ?? "");
      const ok = app.setDateRange(
        String(data.get("from")),
        String(data.get("to")),
        macRaw === "" ? null : Number(macRaw),
      );
      if (ok) void app.refreshCurrentPage();
      break;
    }
    case "route":
      void app.submitRoute({
        origin: String(data.get("origin")),
        destination: String(data.get("destination")),
        depart: Number(data.get("depart")),
        mode: data.get("mode") === "walk" ? "walk" : "car",
      });
      break;
  }
});
