"""Deterministic writers for run summaries and delimited tables.

Floats are printed with 6 significant digits everywhere so that reruns and
golden files compare byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import fields
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from .engine import CurvePoint, Scenario, SimulationResult, StepRecord, energy_report

SUMMARY_FILE = "summary.json"
STEPS_FILE = "steps.csv"
CURVE_FILE = "distance_curve.csv"
DETECTION_FILE = "detection_compare.csv"
UNREACHABLE = "unreachable"


def fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        out = f"{value:.6g}"
        return "0" if out == "-0" else out
    return str(value)


def _json_value(value: Any) -> Any:
    # JSON has no inf/nan: those become null
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        value = float(f"{value:.6g}")
        return 0.0 if value == 0 else value
    return value


def table_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


STEP_COLUMNS = tuple(f.name for f in fields(StepRecord))


def steps_text(steps: Sequence[StepRecord]) -> str:
    return table_text(STEP_COLUMNS, ([getattr(s, c) for c in STEP_COLUMNS] for s in steps))


def summary_document(
    result: SimulationResult, scenario: Scenario, seed: Optional[int] = None
) -> dict:
    energy = energy_report(result, scenario)
    summary = {
        "duration_s": result.duration_s,
        "steps": len(result.steps),
        "frames_generated": result.frames_generated,
        "frames_delivered": result.frames_delivered,
        "frames_dropped": result.frames_dropped,
        "frames_dropped_deadline": result.frames_dropped_deadline,
        "frames_dropped_overflow": result.frames_dropped_overflow,
        "frames_in_queue": result.frames_in_queue,
        "offered_bits": result.offered_bits,
        "delivered_bits": result.delivered_bits,
        "delivered_fraction": result.delivered_fraction,
        "goodput_bps": result.goodput_bps,
        "latency_mean_s": result.latency_mean_s,
        "latency_p95_s": result.latency_p95_s,
        "latency_max_s": result.latency_max_s,
        "energy_drone_j": result.energy_drone_j,
        "energy_ground_j": result.energy_ground_j,
        "expected_detections_per_delivered_frame": result.expected_detections_per_delivered_frame,
    }
    return {
        "scenario": scenario.name,
        "placement": scenario.placement,
        "seed": seed,
        "steps_file": STEPS_FILE,
        "summary": {k: _json_value(v) for k, v in summary.items()},
        "energy": {k: _json_value(v) for k, v in energy.items()},
    }


def summary_text(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_atomic(path: Path, text: str):
    """Write via a temp file in the same directory, then rename into place."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_run(out_dir: Path, result: SimulationResult, scenario: Scenario, seed: Optional[int] = None):
    """Steps table first, summary last, so a summary never points at a missing table."""
    out_dir.mkdir(parents=True, exist_ok=True)
    steps = steps_text(result.steps)
    summary = summary_text(summary_document(result, scenario, seed))
    write_atomic(out_dir / STEPS_FILE, steps)
    write_atomic(out_dir / SUMMARY_FILE, summary)


def curve_text(points: Sequence[CurvePoint]) -> str:
    rows = (
        (p.gain_dbi, p.snr_db, UNREACHABLE if p.max_distance_m is None else p.max_distance_m)
        for p in points
    )
    return table_text(("gain_dbi", "snr_db", "max_distance_m"), rows)


DETECTION_COLUMNS = ("label", "width_px", "height_px", "faces", "expected_detections", "ratio_vs_2k")


def detection_text(rows: Sequence[tuple]) -> str:
    return table_text(DETECTION_COLUMNS, rows)
