"""Command-line front end.

Exit codes: 0 success, 1 validation, 2 I/O, 3 internal error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import detection as det
from . import report
from .config import (
    DISTANCE_SWEEP,
    FACE_SCENE,
    SCENARIO,
    ConfigError,
    document_kind,
    parse_distance_sweep,
    parse_face_scene,
    parse_scenario,
    read_document,
    resolve_document,
    shipped_examples,
    snr_grid,
)
from .engine import run, sweep_max_distance
from .errors import MmDroneError, ValidationError
from .linkbudget import LinkBudgetParams
from .phy_mcs import load_mcs_table

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INTERNAL = 3


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmdrone",
        description="Simulate uncompressed 4K video from a drone over a 60 GHz link.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario and write summary.json + steps.csv")
    p.add_argument("--scenario", required=True, help="scenario file or shipped example name")
    p.add_argument("--out", required=True, type=Path, help="output directory")
    p.add_argument("--mcs-table", type=Path, help="override the scenario's MCS table")
    p.add_argument("--seed", type=_seed, help="seed for Monte Carlo detection draws")
    p.add_argument("--monte-carlo", action="store_true", help="draw detections (needs --seed)")
    p.add_argument("--dt", type=_positive_float, help="override channel sample step (s)")

    p = sub.add_parser("distance-curve", help="max transmission distance vs target SNR")
    p.add_argument("--scenario", help="distance_sweep document or shipped example name")
    p.add_argument("--gains", type=float, nargs="+", help="antenna gains (dBi, both ends)")
    p.add_argument("--snr", type=float, nargs=2, metavar=("START", "STOP"), help="target SNR range (dB)")
    p.add_argument("--snr-step", type=_positive_float, help="SNR grid step (dB)")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--out", type=Path, help="output directory (default: stdout)")

    p = sub.add_parser("detection-compare", help="expected face detections per camera")
    p.add_argument("--scenario", required=True, help="face_scene document or shipped example name")
    p.add_argument("--seed", type=_seed, help="seed for Monte Carlo detection draws")
    p.add_argument("--monte-carlo", action="store_true", help="draw detections (needs --seed)")
    p.add_argument("--out", type=Path, help="output directory (default: stdout)")

    p = sub.add_parser("validate", help="parse and validate a document")
    p.add_argument("--scenario", required=True)
    p.add_argument("--mcs-table", type=Path)

    sub.add_parser("examples", help="list shipped example documents")
    return parser


def _emit(text: str, out: Optional[Path], filename: str):
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    report.write_atomic(out / filename, text)


def _require_seed(args):
    if args.monte_carlo and args.seed is None:
        raise ValidationError("--seed", "Monte Carlo mode requires --seed")


def cmd_run(args) -> int:
    _require_seed(args)
    table = load_mcs_table(args.mcs_table) if args.mcs_table else None
    scenario = parse_scenario(args.scenario, mcs_table=table, dt=args.dt)
    seed = args.seed if args.monte_carlo else None
    result = run(scenario, seed=seed)
    report.write_run(args.out, result, scenario, seed)
    s = result
    print(
        f"{scenario.name}: generated={s.frames_generated} delivered={s.frames_delivered} "
        f"dropped={s.frames_dropped} goodput_bps={report.fmt(s.goodput_bps)}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_distance_curve(args) -> int:
    link = LinkBudgetParams()
    gains = [17.5, 25.4]
    start = stop = 21.0
    step = 1.0
    if args.scenario:
        sweep = parse_distance_sweep(args.scenario)
        link, gains = sweep.link, list(sweep.gains_dbi)
        start, stop, step = sweep.snr_start_db, sweep.snr_stop_db, sweep.snr_step_db
    if args.gains:
        gains = args.gains
    if args.snr:
        start, stop = args.snr
    if args.snr_step:
        step = args.snr_step
    targets = snr_grid(start, stop, step)
    points = sweep_max_distance(link, gains, targets, jobs=args.jobs)
    _emit(report.curve_text(points), args.out, report.CURVE_FILE)
    return EXIT_OK


def detection_rows(doc, seed: Optional[int] = None) -> list[tuple]:
    counts = {
        cam.label: det.expected_detections(doc.calibration, doc.scene(cam), seed=seed)
        for cam in doc.cameras
    }
    base = counts["2K"]
    rows = []
    for cam in doc.cameras:
        ratio = counts[cam.label] / base if base > 0 else math.nan
        rows.append(
            (cam.label, cam.profile.width, cam.profile.height, len(doc.faces), counts[cam.label], ratio)
        )
    return rows


def cmd_detection_compare(args) -> int:
    _require_seed(args)
    doc = parse_face_scene(args.scenario)
    rows = detection_rows(doc, args.seed if args.monte_carlo else None)
    _emit(report.detection_text(rows), args.out, report.DETECTION_FILE)
    return EXIT_OK


def cmd_validate(args) -> int:
    path = resolve_document(args.scenario)
    kind = document_kind(read_document(path))
    if kind == SCENARIO:
        table = load_mcs_table(args.mcs_table) if args.mcs_table else None
        parse_scenario(path, mcs_table=table)
    elif kind == DISTANCE_SWEEP:
        parse_distance_sweep(path)
    elif kind == FACE_SCENE:
        parse_face_scene(path)
    print(f"{path}: valid {kind}")
    return EXIT_OK


def cmd_examples(args) -> int:
    for name in shipped_examples():
        print(name)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "distance-curve": cmd_distance_curve,
    "detection-compare": cmd_detection_compare,
    "validate": cmd_validate,
    "examples": cmd_examples,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    try:
        return COMMANDS[args.command](args)
    except (ValidationError, ConfigError) as exc:
        print(f"mmdrone: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"mmdrone: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except MmDroneError as exc:
        print(f"mmdrone: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"mmdrone: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
