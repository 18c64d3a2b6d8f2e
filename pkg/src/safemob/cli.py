"""Command-line entry points: simulate, replay, kpi report and serve."""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from .config import load_config
from .ingest import EventLog, replay_csv
from .kpi import evaluate_surveys, report_to_doc, report_to_text, responses_from_csv
from .network import load_network_file
from .simulator import load_congestion, load_demand, simulate as run_simulation, write_outputs


@click.group()
def main() -> None:
    """Safe-mobility platform tools."""


@main.command()
@click.option("--network", "network_path", required=True, type=click.Path(exists=True))
@click.option("--demand", "demand_path", required=True, type=click.Path(exists=True))
@click.option("--congestion", "congestion_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=None, help="Overrides the seed in the demand document.")
@click.option("--out", "out_dir", required=True, type=click.Path())
def simulate(network_path, demand_path, congestion_path, seed, out_dir):
    """Generate detections.csv and ground_truth.json from a demand document."""
    net = load_network_file(network_path)
    demand = load_demand(demand_path)
    if seed is not None:
        demand.seed = seed
    congestion = load_congestion(congestion_path) if congestion_path else None
    result = run_simulation(net, demand, congestion)
    csv_path, truth_path = write_outputs(result, out_dir)
    click.echo(f"wrote {len(result.detections)} detections to {csv_path}")
    click.echo(f"wrote {len(result.ground_truth)} ground-truth trips to {truth_path}")


@main.command()
@click.option("--network", "network_path", required=True, type=click.Path(exists=True))
@click.option("--csv", "csv_path", required=True, type=click.Path(exists=True))
@click.option("--log", "log_path", required=True, type=click.Path())
@click.option("--salt-hex", required=True, help="Deployment MAC salt (>= 32 hex chars).")
def replay(network_path, csv_path, log_path, salt_hex):
    """Ingest a detector_id,mac,timestamp CSV into an event log."""
    net = load_network_file(network_path)
    log = EventLog(log_path)
    ingested, rejects = replay_csv(csv_path, net, log, bytes.fromhex(salt_hex), clock=time.time())
    click.echo(f"ingested {ingested} events into {log_path}")
    for line in rejects:
        click.echo(f"rejected: {line}", err=True)
    if rejects:
        sys.exit(1)


@main.command()
@click.option("--responses", "responses_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write the JSON report here.")
def kpi(responses_path, out_path):
    """Score survey responses and evaluate the KPI targets."""
    responses = responses_from_csv(responses_path)
    reports = evaluate_surveys(responses)
    click.echo(report_to_text(reports))
    if out_path:
        Path(out_path).write_text(json.dumps(report_to_doc(reports), indent=1) + "\n", encoding="utf-8")
        click.echo(f"wrote {out_path}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def serve(config_path):
    """Run the HTTP service."""
    from .api import serve as run_server

    run_server(load_config(config_path))


if __name__ == "__main__":
    main()
