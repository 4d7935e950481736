"""Generators and oracles shared across test modules."""

import math

import numpy as np

from mmdrone.engine import Scenario
from mmdrone.kinematics import GimbalState, Trajectory, Waypoint
from mmdrone.phy_mcs import ARRAY_ANTENNA, LENS_ANTENNA, table_from_rows
from mmdrone.video import COMPRESSED, CodecModel, VideoProfile


def linear_scan(table, snr):
    """Oracle: keep the last entry whose threshold is met."""
    best = None
    for entry in table.entries:
        if entry.min_snr_db <= snr:
            best = entry
    return best


def random_table(rng, n):
    thresholds = np.sort(rng.choice(np.arange(-200, 400), size=n, replace=False)) / 10.0
    rates = np.sort(rng.choice(np.arange(1, 10_000), size=n, replace=False)) * 1e6
    return table_from_rows((i + 1, f"m{i}", float(s), float(r)) for i, (s, r) in enumerate(zip(thresholds, rates)))


def lindley_completions(arrivals, size_bits, capacity):
    """Oracle: FIFO single server, constant rate, infinite buffer."""
    done, last = [], -math.inf
    for a in arrivals:
        last = max(a, last) + size_bits / capacity
        done.append(last)
    return done


def random_scenario(mcs_table, seed):
    rng = np.random.default_rng(seed)
    duration = float(rng.uniform(0.5, 3.0))
    n_wp = int(rng.integers(2, 5))
    times = np.sort(rng.uniform(0.0, duration, size=n_wp))
    times[0], times[-1] = 0.0, duration
    if np.any(np.diff(times) <= 0):
        times = np.linspace(0.0, duration, n_wp)
    # half the flights stay near the boresight so the link is mostly up
    spread = 0.15 if rng.random() < 0.5 else 1.5
    waypoints = []
    for t in times:
        z = float(rng.uniform(5, 150))
        xy = rng.uniform(-spread * z, spread * z, size=2)
        waypoints.append(Waypoint(float(t), (float(xy[0]), float(xy[1]), z), float(rng.uniform(-120, 120))))
    waypoints = tuple(waypoints)
    compressed = rng.random() < 0.3
    codec = (
        CodecModel(
            COMPRESSED,
            float(rng.uniform(1, 50)),
            float(rng.uniform(0, 0.05)),
            float(rng.uniform(0, 0.05)),
            float(rng.uniform(0, 5)),
            float(rng.uniform(0, 5)),
        )
        if compressed
        else CodecModel()
    )
    return Scenario(
        mcs_table=mcs_table,
        trajectory=Trajectory(waypoints),
        duration_s=duration,
        ground_hw=LENS_ANTENNA if rng.random() < 0.5 else ARRAY_ANTENNA,
        gimbal=GimbalState(0.0, float(rng.uniform(5, 200))),
        gimbal_enabled=bool(rng.random() < 0.8),
        video=VideoProfile(int(rng.integers(320, 3841)), int(rng.integers(240, 2161)), float(rng.uniform(1, 60)), 24),
        codec=codec,
        channel_sample_dt_s=float(rng.choice([0.005, 0.01, 0.02, 0.05])),
        max_queue_bits=float(rng.uniform(1e8, 4e9)),
        frame_deadline_s=float(rng.uniform(0.05, 1.5)),
        overflow_policy=str(rng.choice(["drop-newest", "drop-oldest"])),
        max_tracking_rate_deg_s=float(rng.choice([math.inf, 20.0])),
    )
