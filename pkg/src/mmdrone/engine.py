"""Time-stepped drone-to-ground video link simulation.

The channel is sampled at the start of every step of ``channel_sample_dt_s``
and held constant until the next sample. Inside a step the frame queue is
a fluid FIFO: the head frame drains at the step's capacity, and arrivals,
completions and deadline expiries are resolved at their exact instants, so
the step size only affects how often the channel is re-evaluated.

Drop rules:
  * deadline: a frame must finish draining by ``t_gen + deadline - decode``.
    An unstarted head frame that cannot make it at the current capacity is
    dropped before it takes any capacity; any frame still queued (started or
    not) at its cut-off is dropped.
  * overflow: an arrival that would push the queue past ``max_queue_bits``
    is dropped (drop-newest) or evicts unstarted frames from the front
    (drop-oldest).
"""

from __future__ import annotations

import bisect
import hashlib
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import detection as det
from .errors import DomainError, MmDroneError, UnreachableError, ValidationError
from .kinematics import (
    ApConfig,
    GimbalState,
    Trajectory,
    aim_angles,
    angular_rate_deg_s,
    fold_mismatch_deg,
    gimbal_step,
    in_scan,
    position_at,
)
from .linkbudget import LinkBudgetParams, max_distance_m, polarization_loss_db, snr_db
from .phy_mcs import LENS_ANTENNA, McsTable, RadioHardware, capacity_bps, select_mcs
from .video import CodecModel, VideoProfile, frame_size_bits, frame_times_s

EDGE = "edge"
ONBOARD = "onboard"
DROP_NEWEST = "drop-newest"
DROP_OLDEST = "drop-oldest"


@dataclass(frozen=True)
class PowerModel:
    rx_idle_w: float = 3.8
    rx_active_w: float = 17.3
    drone_base_w: float = 0.0
    drone_radio_w: float = 0.0
    drone_ai_w: float = 0.0

    def __post_init__(self):
        for name in ("rx_idle_w", "rx_active_w", "drone_base_w", "drone_radio_w", "drone_ai_w"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ValidationError(f"PowerModel.{name}", f"must be >= 0, got {value}")
        if self.rx_active_w < self.rx_idle_w:
            raise ValidationError("PowerModel.rx_active_w", "must be >= rx_idle_w")


@dataclass(frozen=True)
class Scenario:
    mcs_table: McsTable
    trajectory: Trajectory
    duration_s: float
    link: LinkBudgetParams = LinkBudgetParams()
    ground_hw: RadioHardware = LENS_ANTENNA
    drone_hw: RadioHardware = LENS_ANTENNA
    ap: ApConfig = ApConfig()
    gimbal: GimbalState = GimbalState()
    gimbal_enabled: bool = True
    video: VideoProfile = VideoProfile()
    codec: CodecModel = CodecModel()
    power: PowerModel = PowerModel()
    detection: Optional[det.DetectionCalibration] = None
    scene: Optional[det.FaceScene] = None
    channel_sample_dt_s: float = 0.01
    max_queue_bits: float = 8e9
    frame_deadline_s: float = 1.0
    overflow_policy: str = DROP_NEWEST
    placement: str = EDGE
    max_tracking_rate_deg_s: float = math.inf
    mcs_hysteresis_db: float = 0.0
    name: str = ""

    def __post_init__(self):
        if not (self.duration_s >= 0 and math.isfinite(self.duration_s)):
            raise ValidationError("Scenario.duration_s", f"must be >= 0, got {self.duration_s}")
        if not self.channel_sample_dt_s > 0:
            raise ValidationError("Scenario.channel_sample_dt_s", "must be > 0")
        if not self.max_queue_bits > 0:
            raise ValidationError("Scenario.max_queue_bits", "must be > 0")
        if not self.frame_deadline_s > 0:
            raise ValidationError("Scenario.frame_deadline_s", "must be > 0")
        if self.overflow_policy not in (DROP_NEWEST, DROP_OLDEST):
            raise ValidationError("Scenario.overflow_policy", f"unknown {self.overflow_policy!r}")
        if self.placement not in (EDGE, ONBOARD):
            raise ValidationError("Scenario.placement", f"unknown {self.placement!r}")
        if not self.max_tracking_rate_deg_s > 0:
            raise ValidationError("Scenario.max_tracking_rate_deg_s", "must be > 0")
        if self.mcs_hysteresis_db < 0:
            raise ValidationError("Scenario.mcs_hysteresis_db", "must be >= 0")
        if (self.detection is None) != (self.scene is None):
            raise ValidationError("Scenario.detection", "calibration and scene go together")
        if self.duration_s > 0 and not (
            self.trajectory.start <= 0.0 and self.trajectory.end >= self.duration_s
        ):
            raise ValidationError(
                "Scenario.trajectory",
                f"must cover [0, {self.duration_s}] s, spans "
                f"[{self.trajectory.start}, {self.trajectory.end}]",
            )

    def link_params(self) -> LinkBudgetParams:
        """Link budget with the drone antenna transmitting and the AP receiving."""
        return replace(
            self.link,
            tx_gain_dbi=self.drone_hw.antenna_gain_dbi,
            rx_gain_dbi=self.ground_hw.antenna_gain_dbi,
        )

    def digest(self) -> str:
        return hashlib.sha256(repr(self).encode()).hexdigest()


@dataclass(frozen=True)
class StepRecord:
    t: float
    dt: float
    distance_m: float
    az_off_deg: float
    el_off_deg: float
    angular_rate_deg_s: float
    in_scan: bool
    pol_mismatch_deg: float
    extra_loss_db: float
    snr_db: float
    mcs_index: Optional[int]
    capacity_bps: float
    queue_bits: float
    bits_sent: float
    delivered_bits_cum: float
    frames_generated_cum: int
    frames_delivered_cum: int
    frames_dropped_cum: int
    ground_active: bool


@dataclass
class SimulationResult:
    steps: list[StepRecord]
    frames_generated: int = 0
    frames_delivered: int = 0
    frames_dropped: int = 0
    frames_dropped_deadline: int = 0
    frames_dropped_overflow: int = 0
    frames_in_queue: int = 0
    delivered_bits: float = 0.0
    offered_bits: float = 0.0
    latency_mean_s: float = math.nan
    latency_p95_s: float = math.nan
    latency_max_s: float = math.nan
    goodput_bps: float = 0.0
    energy_drone_j: float = 0.0
    energy_ground_j: float = 0.0
    expected_detections_per_delivered_frame: Optional[float] = None
    latencies_s: list[float] = field(default_factory=list, repr=False)
    duration_s: float = 0.0
    scenario_digest: str = ""

    @property
    def delivered_fraction(self) -> float:
        return self.delivered_bits / self.offered_bits if self.offered_bits else 0.0


class _Frame:
    __slots__ = ("t_gen", "bits", "remaining", "cut", "started")

    def __init__(self, t_gen: float, bits: float, cut: float):
        self.t_gen = t_gen
        self.bits = bits
        self.remaining = bits
        self.cut = cut
        self.started = False


class _FluidQueue:
    """FIFO of frames draining head-first at a piecewise-constant rate."""

    def __init__(self, max_bits: float, policy: str, decode_latency_s: float):
        self.frames: deque[_Frame] = deque()
        self.bits = 0.0
        self.max_bits = max_bits
        self.policy = policy
        self.decode_latency_s = decode_latency_s
        self.dropped_deadline = 0
        self.dropped_overflow = 0
        self.delivered = 0
        self.delivered_bits = 0.0
        self.latencies: list[float] = []

    def _pop_head(self) -> _Frame:
        frame = self.frames.popleft()
        self.bits -= frame.remaining
        if not self.frames:
            self.bits = 0.0  # shed accumulated rounding
        return frame

    def expire(self, now: float):
        # cut-offs are ordered like generation times, so expiries come off the front
        while self.frames and self.frames[0].cut <= now:
            self._pop_head()
            self.dropped_deadline += 1

    def admit_head(self, now: float, rate: float):
        while self.frames and rate > 0:
            head = self.frames[0]
            if head.started or now + head.remaining / rate <= head.cut:
                return
            self._pop_head()
            self.dropped_deadline += 1

    def push(self, frame: _Frame):
        if self.bits + frame.bits > self.max_bits and self.policy == DROP_OLDEST:
            kept = deque(f for f in self.frames if f.started)
            victims = [f for f in self.frames if not f.started]
            while victims and self.bits + frame.bits > self.max_bits:
                self.bits -= victims.pop(0).remaining
                self.dropped_overflow += 1
            self.frames = kept + deque(victims)
        if self.bits + frame.bits > self.max_bits:
            self.dropped_overflow += 1
            return
        self.frames.append(frame)
        self.bits += frame.bits

    def drain(self, elapsed: float, rate: float, now: float, completes: bool) -> float:
        head = self.frames[0]
        head.started = True
        if completes:
            sent = head.remaining
            head.remaining = 0.0
            self.frames.popleft()
            if not self.frames:
                self.bits = 0.0
            else:
                self.bits -= sent
            self.delivered += 1
            self.delivered_bits += head.bits
            self.latencies.append(now + self.decode_latency_s - head.t_gen)
            return sent
        sent = min(head.remaining, elapsed * rate)
        head.remaining -= sent
        self.bits -= sent
        return sent


def _step_times(duration_s: float, dt: float) -> list[tuple[float, float]]:
    steps = []
    k = 0
    while True:
        t0 = k * dt
        if t0 >= duration_s or math.isclose(t0, duration_s, rel_tol=1e-12, abs_tol=1e-12):
            return steps
        steps.append((t0, min((k + 1) * dt, duration_s)))
        k += 1


def _pointing_rate(traj: Trajectory, ap: ApConfig, t: float, h: float) -> float:
    if t + h <= traj.end:
        return angular_rate_deg_s(traj, ap, t, h)
    h = min(h, t - traj.start)
    if h <= 0:
        return 0.0
    return angular_rate_deg_s(traj, ap, t - h, h)


def run(scenario: Scenario, seed: Optional[int] = None) -> SimulationResult:
    """Simulate ``scenario``; ``seed`` switches detections to Monte Carlo draws."""
    sc = scenario
    result = SimulationResult(steps=[], duration_s=sc.duration_s, scenario_digest=sc.digest())
    if sc.duration_s == 0:
        return result

    link = sc.link_params()
    frame_bits = frame_size_bits(sc.video, sc.codec)
    gen_times = frame_times_s(sc.video, sc.duration_s)
    enc = sc.codec.encode_latency_s
    dec = sc.codec.decode_latency_s
    queue = _FluidQueue(sc.max_queue_bits, sc.overflow_policy, dec)
    next_frame = 0  # index into gen_times of the next frame still in the encoder

    gimbal = sc.gimbal
    current_mcs = None
    delivered_bits_cum = 0.0
    ground_active_s = 0.0

    for t0, t1 in _step_times(sc.duration_s, sc.channel_sample_dt_s):
        dt = t1 - t0
        pos, roll = position_at(sc.trajectory, t0)
        offset = np.asarray(pos) - np.asarray(sc.ap.position)
        distance = float(np.linalg.norm(offset))
        if distance == 0:
            raise DomainError(f"drone coincides with the AP at t={t0}")
        az, el = aim_angles(sc.ap, pos)
        rate = _pointing_rate(sc.trajectory, sc.ap, t0, sc.channel_sample_dt_s)
        scan_ok = in_scan(sc.ground_hw, az, el)
        tracking_ok = rate <= sc.max_tracking_rate_deg_s

        if sc.gimbal_enabled:
            gimbal, mismatch = gimbal_step(gimbal, roll, dt)
        else:
            mismatch = fold_mismatch_deg(roll - gimbal.roll_deg)
        loss = polarization_loss_db(mismatch)
        snr = snr_db(link, distance, loss)
        entry = select_mcs(sc.mcs_table, snr, current_mcs, sc.mcs_hysteresis_db)
        current_mcs = entry
        if not (scan_ok and tracking_ok):
            entry = None
        cap = min(capacity_bps(entry, sc.drone_hw), sc.ground_hw.max_throughput_bps)

        delivered_before = queue.delivered
        sent_in_step = 0.0
        now = t0
        while True:
            queue.expire(now)
            queue.admit_head(now, cap)
            t_next = t1
            t_done = math.inf
            if next_frame < len(gen_times):
                t_next = min(t_next, gen_times[next_frame] + enc)
            if queue.frames:
                head = queue.frames[0]
                if cap > 0:
                    t_done = now + head.remaining / cap
                    t_next = min(t_next, t_done)
                t_next = min(t_next, head.cut)
            if queue.frames and cap > 0:
                sent_in_step += queue.drain(t_next - now, cap, t_next, t_next == t_done)
            now = t_next
            while next_frame < len(gen_times) and gen_times[next_frame] + enc <= now and now < t1:
                tg = gen_times[next_frame]
                queue.push(_Frame(tg, frame_bits, tg + sc.frame_deadline_s - dec))
                next_frame += 1
            if now >= t1:
                break

        delivered_bits_cum = queue.delivered_bits
        active = sent_in_step > 0 or queue.delivered > delivered_before
        if active:
            ground_active_s += dt
        result.steps.append(
            StepRecord(
                t=t0,
                dt=dt,
                distance_m=distance,
                az_off_deg=az,
                el_off_deg=el,
                angular_rate_deg_s=rate,
                in_scan=scan_ok,
                pol_mismatch_deg=mismatch,
                extra_loss_db=loss,
                snr_db=snr,
                mcs_index=entry.index if entry is not None else None,
                capacity_bps=cap,
                queue_bits=max(queue.bits, 0.0),
                bits_sent=sent_in_step,
                delivered_bits_cum=delivered_bits_cum,
                frames_generated_cum=bisect.bisect_left(gen_times, t1),
                frames_delivered_cum=queue.delivered,
                frames_dropped_cum=queue.dropped_deadline + queue.dropped_overflow,
                ground_active=active,
            )
        )

    result.frames_generated = len(gen_times)
    result.frames_delivered = queue.delivered
    result.frames_dropped_deadline = queue.dropped_deadline
    result.frames_dropped_overflow = queue.dropped_overflow
    result.frames_dropped = queue.dropped_deadline + queue.dropped_overflow
    result.frames_in_queue = len(queue.frames) + (len(gen_times) - next_frame)
    result.delivered_bits = queue.delivered_bits
    result.offered_bits = len(gen_times) * frame_bits
    result.goodput_bps = queue.delivered_bits / sc.duration_s
    result.latencies_s = list(queue.latencies)
    if queue.latencies:
        lat = np.asarray(queue.latencies)
        result.latency_mean_s = float(lat.mean())
        result.latency_p95_s = float(np.percentile(lat, 95))
        result.latency_max_s = float(lat.max())

    report = energy_report(result, sc)
    result.energy_drone_j = report["drone_total_j"]
    result.energy_ground_j = report["ground_total_j"]

    if sc.detection is not None:
        scene = sc.scene.with_camera(det.Camera(sc.video, sc.scene.camera.horizontal_fov_deg))
        ratio = sc.codec.compression_ratio
        if seed is None:
            result.expected_detections_per_delivered_frame = det.expected_detections(
                sc.detection, scene, compression_ratio=ratio
            )
        elif queue.delivered:
            probs = np.asarray(det.face_probabilities(sc.detection, scene, ratio))
            rng = np.random.default_rng(seed)
            hits = rng.random((queue.delivered, len(probs))) < probs
            result.expected_detections_per_delivered_frame = float(hits.sum(axis=1).mean())
        else:
            result.expected_detections_per_delivered_frame = 0.0
    return result


def energy_report(result: SimulationResult, scenario: Scenario) -> dict[str, float]:
    """Per-side energy breakdown in joules, recomputed from the step records."""
    if result.scenario_digest != scenario.digest():
        raise MmDroneError("result was not produced from this scenario")
    p = scenario.power
    codec = scenario.codec
    duration = sum(s.dt for s in result.steps)
    active_s = sum(s.dt for s in result.steps if s.ground_active)
    onboard = scenario.placement == ONBOARD
    if onboard:
        active_s = 0.0
    idle_s = duration - active_s

    report = {
        "flight_time_s": duration,
        "drone_base_j": p.drone_base_w * duration,
        "drone_radio_j": p.drone_radio_w * duration,
        "drone_ai_j": p.drone_ai_w * duration if onboard else 0.0,
        "drone_encode_j": codec.encode_power_w * codec.encode_latency_s * result.frames_generated,
        "ground_active_s": active_s,
        "ground_idle_s": idle_s,
        "ground_active_j": p.rx_active_w * active_s,
        "ground_idle_j": p.rx_idle_w * idle_s,
        "ground_decode_j": codec.decode_power_w * codec.decode_latency_s * result.frames_delivered,
    }
    report["drone_total_j"] = (
        report["drone_base_j"] + report["drone_radio_j"]
        + report["drone_ai_j"] + report["drone_encode_j"]
    )
    report["ground_total_j"] = (
        report["ground_active_j"] + report["ground_idle_j"] + report["ground_decode_j"]
    )
    return report


@dataclass(frozen=True)
class CurvePoint:
    gain_dbi: float
    snr_db: float
    max_distance_m: Optional[float]  # None marks an unreachable target


def _curve_point(template: LinkBudgetParams, gain: float, target: float) -> CurvePoint:
    params = replace(template, tx_gain_dbi=gain, rx_gain_dbi=gain)
    try:
        return CurvePoint(gain, target, max_distance_m(params, target))
    except UnreachableError:
        return CurvePoint(gain, target, None)


def sweep_max_distance(
    template: LinkBudgetParams,
    gains_dbi: Sequence[float],
    snr_targets_db: Sequence[float],
    jobs: int = 1,
) -> list[CurvePoint]:
    """Max distance for every (gain, target) pair, same gain at both ends.

    Output order is gain-major and independent of ``jobs``.
    """
    grid = [(g, s) for g in gains_dbi for s in snr_targets_db]
    if jobs <= 1:
        return [_curve_point(template, g, s) for g, s in grid]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda gs: _curve_point(template, *gs), grid))
