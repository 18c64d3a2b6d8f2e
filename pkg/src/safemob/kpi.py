"""Three-phase survey scoring and KPI target evaluation."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

PHASE_BASELINE = "Baseline"
PHASE_INTERMEDIATE = "Intermediate"
PHASE_POST_PILOT = "PostPilot"

EXPECTED_ANSWER_COUNTS = {
    PHASE_BASELINE: 16,
    PHASE_INTERMEDIATE: 35,
    PHASE_POST_PILOT: 35,
}

FACTOR_COMFORT = "Comfort"
FACTOR_SAFETY = "Safety"
FACTOR_AWARENESS = "Awareness"
FACTORS = (FACTOR_COMFORT, FACTOR_SAFETY, FACTOR_AWARENESS)

# target percentage increase per factor
KPI_TARGETS = {FACTOR_COMFORT: 10.0, FACTOR_SAFETY: 5.0, FACTOR_AWARENESS: 100.0}

# absorbs float representation noise when means land exactly on a target
# (e.g. 3.3/3.0 evaluates below 10% by ~7e-15); one Likert point is orders
# of magnitude larger, so this cannot blur a genuinely missed target
MET_EPSILON = 1e-9

SCORE_MIN, SCORE_MAX = 1, 5


class KpiError(ValueError):
    pass


@dataclass(frozen=True)
class Answer:
    question_id: str
    factor: str
    score: int

    def __post_init__(self) -> None:
        if self.factor not in FACTORS:
            raise KpiError(f"unknown factor {self.factor!r}")
        if not SCORE_MIN <= self.score <= SCORE_MAX:
            raise KpiError(f"score {self.score} outside {SCORE_MIN}..{SCORE_MAX}")


@dataclass(frozen=True)
class SurveyResponse:
    respondent_id: str
    phase: str
    answers: tuple[Answer, ...]

    def __post_init__(self) -> None:
        if self.phase not in EXPECTED_ANSWER_COUNTS:
            raise KpiError(f"unknown phase {self.phase!r}")


@dataclass(frozen=True)
class FactorKpi:
    baseline_mean: float
    comparison_mean: float
    percent_change: float
    target_percent: float
    met: bool


def score_phase(responses: Sequence[SurveyResponse]) -> dict[str, float]:
    """Mean score per factor across all respondents and questions of one phase."""
    if not responses:
        raise KpiError("phase has no responses")
    phase = responses[0].phase
    expected = EXPECTED_ANSWER_COUNTS[phase]
    sums = {f: 0.0 for f in FACTORS}
    counts = {f: 0 for f in FACTORS}
    for r in responses:
        if r.phase != phase:
            raise KpiError(f"mixed phases in one scoring call: {r.phase} vs {phase}")
        if len(r.answers) != expected:
            raise KpiError(
                f"respondent {r.respondent_id}: {phase} response has {len(r.answers)} answers, expected {expected}"
            )
        for a in r.answers:
            sums[a.factor] += a.score
            counts[a.factor] += 1
    return {f: sums[f] / counts[f] for f in FACTORS if counts[f] > 0}


def kpi_report(baseline_scores: dict[str, float], comparison_scores: dict[str, float]) -> dict[str, FactorKpi]:
    """Percent change per factor against the fixed targets."""
    report = {}
    for factor in FACTORS:
        if factor not in baseline_scores or factor not in comparison_scores:
            continue
        base = baseline_scores[factor]
        comp = comparison_scores[factor]
        if base <= 0:
            raise KpiError(f"{factor}: baseline mean {base} makes percent change undefined")
        change = 100.0 * (comp - base) / base
        target = KPI_TARGETS[factor]
        report[factor] = FactorKpi(
            baseline_mean=base,
            comparison_mean=comp,
            percent_change=change,
            target_percent=target,
            met=change >= target - MET_EPSILON,
        )
    return report


def evaluate_surveys(responses: Sequence[SurveyResponse]) -> dict[str, dict[str, FactorKpi]]:
    """Score all phases and compare both follow-ups against the baseline."""
    by_phase: dict[str, list[SurveyResponse]] = {}
    for r in responses:
        by_phase.setdefault(r.phase, []).append(r)
    if PHASE_BASELINE not in by_phase:
        raise KpiError("no baseline responses")
    baseline = score_phase(by_phase[PHASE_BASELINE])
    out = {}
    for phase in (PHASE_INTERMEDIATE, PHASE_POST_PILOT):
        if phase in by_phase:
            out[phase] = kpi_report(baseline, score_phase(by_phase[phase]))
    return out


def responses_from_csv(path: str | Path) -> list[SurveyResponse]:
    """Read respondent_id,phase,question_id,factor,score rows into responses."""
    grouped: dict[tuple[str, str], list[Answer]] = {}
    order: list[tuple[str, str]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"respondent_id", "phase", "question_id", "factor", "score"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise KpiError(f"{path}: expected columns {sorted(required)}")
        for row in reader:
            key = (row["respondent_id"], row["phase"])
            if key not in grouped:
                grouped[key] = []
                order.append(key)
            grouped[key].append(
                Answer(question_id=row["question_id"], factor=row["factor"], score=int(row["score"]))
            )
    return [
        SurveyResponse(respondent_id=rid, phase=phase, answers=tuple(grouped[(rid, phase)]))
        for rid, phase in order
    ]


def load_survey_definition(path: str | Path) -> dict[str, list[tuple[str, str]]]:
    """Question-to-factor mapping per phase (the questionnaires are not public
    so the bundled definition is synthetic)."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    out = {}
    for phase, questions in doc["phases"].items():
        if phase not in EXPECTED_ANSWER_COUNTS:
            raise KpiError(f"unknown phase {phase!r} in survey definition")
        qs = [(str(q["question_id"]), str(q["factor"])) for q in questions]
        if len(qs) != EXPECTED_ANSWER_COUNTS[phase]:
            raise KpiError(
                f"{phase}: definition has {len(qs)} questions, expected {EXPECTED_ANSWER_COUNTS[phase]}"
            )
        out[phase] = qs
    return out


def report_to_doc(reports: dict[str, dict[str, FactorKpi]]) -> dict:
    return {
        "format": "safemob-kpi-report",
        "version": 1,
        "comparisons": {
            phase: {
                factor: {
                    "baseline_mean": k.baseline_mean,
                    "comparison_mean": k.comparison_mean,
                    "percent_change": k.percent_change,
                    "target_percent": k.target_percent,
                    "met": k.met,
                }
                for factor, k in report.items()
            }
            for phase, report in reports.items()
        },
    }


def report_to_text(reports: dict[str, dict[str, FactorKpi]]) -> str:
    lines = []
    for phase, report in reports.items():
        lines.append(f"{phase} vs Baseline")
        lines.append(f"{'Factor':<10} {'Base':>6} {'Now':>6} {'Change %':>9} {'Target %':>9}  Met")
        for factor, k in report.items():
            lines.append(
                f"{factor:<10} {k.baseline_mean:>6.2f} {k.comparison_mean:>6.2f} "
                f"{k.percent_change:>9.2f} {k.target_percent:>9.1f}  {'yes' if k.met else 'no'}"
            )
        lines.append("")
    return "\n".join(lines)
