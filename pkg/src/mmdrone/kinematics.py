"""Drone trajectory, ground-antenna pointing geometry and the polarization gimbal.

Frame: right-handed, centred on the ground AP, z up, metres and seconds.
Angles are in degrees at every public boundary.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .phy_mcs import RadioHardware

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class Waypoint:
    t: float
    position: Vec3
    roll_deg: float = 0.0


@dataclass(frozen=True)
class Trajectory:
    waypoints: tuple[Waypoint, ...]

    def __post_init__(self):
        wps = tuple(self.waypoints)
        object.__setattr__(self, "waypoints", wps)
        if not wps:
            raise ValidationError("Trajectory.waypoints", "at least one waypoint required")
        for a, b in zip(wps, wps[1:]):
            if not b.t > a.t:
                raise ValidationError(
                    "Trajectory.waypoints", f"times not strictly increasing at t={b.t}"
                )
        for wp in wps:
            if len(wp.position) != 3 or not all(math.isfinite(c) for c in wp.position):
                raise ValidationError("Trajectory.waypoints", f"bad position at t={wp.t}")
        object.__setattr__(self, "_times", [wp.t for wp in wps])

    @property
    def start(self) -> float:
        return self.waypoints[0].t

    @property
    def end(self) -> float:
        return self.waypoints[-1].t

    @classmethod
    def hover(cls, position: Vec3, duration_s: float, roll_deg: float = 0.0) -> "Trajectory":
        if duration_s <= 0:
            return cls((Waypoint(0.0, tuple(position), roll_deg),))
        return cls((
            Waypoint(0.0, tuple(position), roll_deg),
            Waypoint(float(duration_s), tuple(position), roll_deg),
        ))


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0 or not math.isfinite(n):
        raise DomainError("zero-length direction vector")
    return v / n


@dataclass(frozen=True)
class ApConfig:
    boresight: Vec3 = (0.0, 0.0, 1.0)
    position: Vec3 = field(default=(0.0, 0.0, 0.0), init=False)

    def __post_init__(self):
        b = np.asarray(self.boresight, dtype=float)
        if b.shape != (3,) or abs(np.linalg.norm(b) - 1.0) > 1e-9:
            raise ValidationError("ApConfig.boresight", "must be a unit 3-vector")
        object.__setattr__(self, "boresight", tuple(float(x) for x in b))

    def antenna_axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(boresight, horizontal, vertical) unit axes of the antenna frame.

        Vertical is world-up projected off the boresight; for a zenith
        boresight, where that projection vanishes, world +y takes its place.
        """
        b = np.asarray(self.boresight)
        up = np.array([0.0, 0.0, 1.0])
        v = up - np.dot(up, b) * b
        if np.linalg.norm(v) < 1e-6:
            v = np.array([0.0, 1.0, 0.0]) - b[1] * b
        v = v / np.linalg.norm(v)
        v = v - np.dot(v, b) * b  # second Gram-Schmidt pass against cancellation
        v = v / np.linalg.norm(v)
        h = np.cross(v, b)
        return b, h, v


def position_at(traj: Trajectory, t: float) -> tuple[Vec3, float]:
    """Piecewise-linear position and roll at time ``t``."""
    if not traj.start <= t <= traj.end:
        raise DomainError(f"t={t} outside trajectory span [{traj.start}, {traj.end}]")
    wps = traj.waypoints
    i = bisect.bisect_right(traj._times, t)
    if i >= len(wps):
        return wps[-1].position, wps[-1].roll_deg
    a, b = wps[i - 1], wps[i]
    if t == a.t:
        return a.position, a.roll_deg
    w = (t - a.t) / (b.t - a.t)
    pos = tuple(pa + w * (pb - pa) for pa, pb in zip(a.position, b.position))
    return pos, a.roll_deg + w * (b.roll_deg - a.roll_deg)


def aim_angles(ap: ApConfig, position: Sequence[float]) -> tuple[float, float]:
    """Horizontal and vertical offset (deg) of the drone from the AP boresight.

    Azimuth is measured in the boresight/horizontal plane, elevation out of
    it, so the pair is an az-over-el decomposition around the boresight.
    """
    u = _unit(np.asarray(position, dtype=float) - np.asarray(ap.position))
    b, h, v = ap.antenna_axes()
    ub, uh, uv = float(u @ b), float(u @ h), float(u @ v)
    az = math.degrees(math.atan2(uh, ub))
    el = math.degrees(math.atan2(uv, math.hypot(ub, uh)))
    return az, el


def in_scan(hardware: RadioHardware, az_off_deg: float, el_off_deg: float) -> bool:
    return abs(az_off_deg) <= hardware.scan_az_deg and abs(el_off_deg) <= hardware.scan_el_deg


def _direction(traj: Trajectory, ap: ApConfig, t: float) -> np.ndarray:
    pos, _ = position_at(traj, t)
    return _unit(np.asarray(pos) - np.asarray(ap.position))


def angular_rate_deg_s(traj: Trajectory, ap: ApConfig, t: float, dt: float) -> float:
    """Forward-difference rate of the AP-to-drone pointing direction (deg/s)."""
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    u0 = _direction(traj, ap, t)
    u1 = _direction(traj, ap, t + dt)
    # atan2 form stays accurate for the tiny angles small dt produces
    angle = math.atan2(float(np.linalg.norm(np.cross(u0, u1))), float(u0 @ u1))
    return math.degrees(angle) / dt


def fold_mismatch_deg(angle_deg: float) -> float:
    """Fold a polarization-plane difference into [0, 90] deg (period 180)."""
    m = math.fmod(abs(angle_deg), 180.0)
    return 180.0 - m if m > 90.0 else m


@dataclass(frozen=True)
class GimbalState:
    roll_deg: float = 0.0
    rate_limit_deg_s: float = 90.0

    def __post_init__(self):
        if not self.rate_limit_deg_s > 0:
            raise ValidationError("GimbalState.rate_limit_deg_s", "must be > 0")


def gimbal_step(state: GimbalState, target_roll_deg: float, dt: float) -> tuple[GimbalState, float]:
    """Slew the gimbal toward ``target_roll_deg`` for ``dt`` seconds.

    Linear polarization repeats every 180 deg, so the gimbal takes the
    shorter of the equivalent paths. Returns the new state and the residual
    mismatch folded into [0, 90] deg.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    error = math.remainder(target_roll_deg - state.roll_deg, 180.0)
    max_move = state.rate_limit_deg_s * dt
    move = max(-max_move, min(max_move, error))
    new_state = GimbalState(state.roll_deg + move, state.rate_limit_deg_s)
    return new_state, fold_mismatch_deg(target_roll_deg - new_state.roll_deg)
