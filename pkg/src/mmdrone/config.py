"""YAML documents for scenarios, distance sweeps and face scenes.

Parsing is strict: every mapping is checked for unknown keys, required keys
must be present, and every value is pushed through the domain constructors
so their invariants are enforced. Defaults exist only for documented knobs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from . import detection as det
from .engine import DROP_NEWEST, EDGE, PowerModel, Scenario
from .errors import ValidationError
from .kinematics import ApConfig, GimbalState, Trajectory, Waypoint
from .linkbudget import LinkBudgetParams
from .phy_mcs import HARDWARE_PROFILES, McsTable, RadioHardware, load_mcs_table
from .video import CodecModel, VideoProfile

SCENARIO = "scenario"
DISTANCE_SWEEP = "distance_sweep"
FACE_SCENE = "face_scene"
SHIPPED_SUFFIX = ".yaml"

_MISSING = object()


class ConfigError(ValidationError):
    """Parse or schema error in a config document."""


class _Section:
    """Strict accessor over one mapping of a document."""

    def __init__(self, data: Any, path: str):
        if not isinstance(data, dict):
            raise ConfigError(path, f"expected a mapping, got {type(data).__name__}")
        self.data = data
        self.path = path
        self.seen: set[str] = set()

    def _key(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def get(self, key: str, kind: str, default: Any = _MISSING) -> Any:
        self.seen.add(key)
        if key not in self.data or (self.data[key] is None and kind != "number?"):
            if default is _MISSING:
                raise ConfigError(self._key(key), "required key is missing")
            return default
        return _coerce(self.data[key], kind, self._key(key))

    def section(self, key: str, required: bool = True) -> Optional["_Section"]:
        self.seen.add(key)
        if key not in self.data:
            if required:
                raise ConfigError(self._key(key), "required section is missing")
            return None
        return _Section(self.data[key], self._key(key))

    def items(self, key: str) -> list["_Section"]:
        self.seen.add(key)
        if key not in self.data:
            raise ConfigError(self._key(key), "required key is missing")
        value = self.data[key]
        if value is None:
            value = []
        if not isinstance(value, list):
            raise ConfigError(self._key(key), "expected a list")
        return [_Section(v, f"{self._key(key)}[{i}]") for i, v in enumerate(value)]

    def done(self):
        unknown = sorted(str(k) for k in self.data if k not in self.seen)
        if unknown:
            where = self.path or "document"
            raise ConfigError(where, f"unknown key(s): {', '.join(unknown)}")


def _coerce(value: Any, kind: str, where: str) -> Any:
    if kind in ("number", "number?"):
        if value is None and kind == "number?":
            return math.inf
        if isinstance(value, str):
            # YAML 1.1 reads exponent forms such as 60.0e9 as strings
            try:
                return float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(where, f"expected a number, got {value!r}")
        return float(value)
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(where, f"expected an integer, got {value!r}")
        return value
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigError(where, f"expected a string, got {value!r}")
        return value
    if kind == "bool":
        if not isinstance(value, bool):
            raise ConfigError(where, f"expected true/false, got {value!r}")
        return value
    if kind == "vec3":
        if not (isinstance(value, list) and len(value) == 3):
            raise ConfigError(where, f"expected a 3-element list, got {value!r}")
        return tuple(_coerce(v, "number", where) for v in value)
    if kind == "numbers":
        if not isinstance(value, list) or not value:
            raise ConfigError(where, "expected a non-empty list of numbers")
        return [_coerce(v, "number", where) for v in value]
    raise AssertionError(kind)


def read_document(path: Union[str, Path]) -> dict:
    """Load YAML; parse errors carry the line and column."""
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark else str(path)
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(where, f"YAML parse error: {problem}") from None
    if not isinstance(data, dict):
        raise ConfigError(str(path), "document must be a mapping")
    return data


def resolve_document(name_or_path: Union[str, Path]) -> Path:
    """A path to an existing file, or the name of a shipped example."""
    path = Path(name_or_path)
    if path.exists():
        return path
    shipped = resources.files("mmdrone.data").joinpath("scenarios", f"{name_or_path}{SHIPPED_SUFFIX}")
    if path.suffix == "" and shipped.is_file():
        return Path(str(shipped))
    raise FileNotFoundError(f"no such scenario file or shipped example: {name_or_path}")


def shipped_examples() -> list[str]:
    folder = resources.files("mmdrone.data").joinpath("scenarios")
    return sorted(p.name[: -len(SHIPPED_SUFFIX)] for p in folder.iterdir() if p.name.endswith(SHIPPED_SUFFIX))


def document_kind(data: dict) -> str:
    kind = data.get("kind", SCENARIO)
    if kind not in (SCENARIO, DISTANCE_SWEEP, FACE_SCENE):
        raise ConfigError("kind", f"unknown document kind {kind!r}")
    return kind


def _build(where: str, factory, *args, **kwargs):
    # prefix domain validation errors with the document location
    try:
        return factory(*args, **kwargs)
    except ValidationError as exc:
        raise ConfigError(f"{where} -> {exc.field}", str(exc).split(": ", 1)[-1]) from None


def parse_link(sec: _Section) -> LinkBudgetParams:
    kw = dict(
        carrier_freq_hz=sec.get("carrier_freq_hz", "number"),
        bandwidth_hz=sec.get("bandwidth_hz", "number"),
        tx_power_dbm=sec.get("tx_power_dbm", "number"),
        noise_density_dbm_per_hz=sec.get("noise_density_dbm_per_hz", "number"),
        noise_figure_db=sec.get("noise_figure_db", "number"),
        misc_loss_db=sec.get("misc_loss_db", "number", 0.0),
    )
    sec.done()
    return _build(sec.path, LinkBudgetParams, **kw)


def parse_radio(sec: _Section) -> RadioHardware:
    """A named profile (lens/array) with optional per-field overrides."""
    base = None
    profile = sec.get("profile", "str", None)
    if profile is not None:
        if profile not in HARDWARE_PROFILES:
            raise ConfigError(f"{sec.path}.profile", f"unknown profile {profile!r}")
        base = HARDWARE_PROFILES[profile]
    fields = {}
    for key in ("antenna_gain_dbi", "scan_az_deg", "scan_el_deg", "max_throughput_bps"):
        fallback = getattr(base, key) if base is not None else _MISSING
        fields[key] = sec.get(key, "number", fallback)
    sec.done()
    return _build(sec.path, RadioHardware, **fields)


def parse_video(sec: _Section) -> VideoProfile:
    profile = _build(
        sec.path,
        VideoProfile,
        width=sec.get("width_px", "int"),
        height=sec.get("height_px", "int"),
        fps=sec.get("fps", "number"),
        bits_per_pixel=sec.get("bits_per_pixel", "int", 24),
    )
    sec.done()
    return profile


def parse_codec(sec: Optional[_Section]) -> CodecModel:
    if sec is None:
        return CodecModel()
    codec = _build(
        sec.path,
        CodecModel,
        mode=sec.get("mode", "str"),
        compression_ratio=sec.get("compression_ratio", "number", 1.0),
        encode_latency_s=sec.get("encode_latency_s", "number", 0.0),
        decode_latency_s=sec.get("decode_latency_s", "number", 0.0),
        encode_power_w=sec.get("encode_power_w", "number", 0.0),
        decode_power_w=sec.get("decode_power_w", "number", 0.0),
    )
    sec.done()
    return codec


def parse_calibration(sec: Optional[_Section]) -> det.DetectionCalibration:
    if sec is None:
        return det.DetectionCalibration()
    kw = dict(
        min_face_px=sec.get("min_face_px", "number", 8.0),
        quality_factor=sec.get("quality_factor", "number", 1.0),
        compression_exponent=sec.get("compression_exponent", "number", 0.0),
    )
    anchor_2k = sec.get("anchor_2k_px", "number", None)
    anchors = sec.items("anchors") if "anchors" in sec.data else None
    sec.done()
    if anchor_2k is not None and anchors is not None:
        raise ConfigError(sec.path, "give either anchor_2k_px or anchors, not both")
    if anchors is not None:
        pairs = []
        for a in anchors:
            pairs.append((a.get("face_px", "number"), a.get("rate", "number")))
            a.done()
        return _build(sec.path, det.DetectionCalibration, anchors=tuple(pairs), **kw)
    return _build(sec.path, det.DetectionCalibration.from_2k_anchor, anchor_2k if anchor_2k is not None else 12.0, **kw)


def parse_faces(root: _Section) -> tuple[det.Face, ...]:
    faces = []
    for item in root.items("faces"):
        count = item.get("count", "int", 1)
        if count < 0:
            raise ConfigError(f"{item.path}.count", "must be >= 0")
        face = _build(
            item.path,
            det.Face,
            physical_width_m=item.get("physical_width_m", "number"),
            distance_m=item.get("distance_m", "number"),
        )
        item.done()
        faces.extend([face] * count)
    return tuple(faces)


def parse_trajectory(sec: _Section) -> Trajectory:
    waypoints = []
    for item in sec.items("waypoints"):
        waypoints.append(
            Waypoint(
                t=item.get("t_s", "number"),
                position=item.get("position_m", "vec3"),
                roll_deg=item.get("roll_deg", "number", 0.0),
            )
        )
        item.done()
    sec.done()
    return _build(sec.path, Trajectory, tuple(waypoints))


def _mcs_source(value: str, base_dir: Path) -> Optional[Path]:
    if value == "default":
        return None
    path = Path(value)
    if not path.is_absolute():
        path = base_dir / path
    if not path.is_file():
        raise ConfigError("mcs_table", f"referenced MCS table file does not exist: {path}")
    return path


def parse_scenario(
    path: Union[str, Path],
    mcs_table: Optional[McsTable] = None,
    dt: Optional[float] = None,
) -> Scenario:
    """Read and fully validate a scenario document.

    ``mcs_table`` and ``dt`` override the document's table and channel step.
    """
    path = resolve_document(path)
    data = read_document(path)
    if document_kind(data) != SCENARIO:
        raise ConfigError("kind", f"{path} is a {data['kind']} document, not a scenario")
    root = _Section(data, "")
    root.get("kind", "str", SCENARIO)
    name = root.get("name", "str", path.stem)
    duration = root.get("duration_s", "number")
    sample_dt = root.get("channel_sample_dt_s", "number", 0.01)
    placement = root.get("placement", "str", EDGE)
    hysteresis = root.get("mcs_hysteresis_db", "number", 0.0)
    table_ref = root.get("mcs_table", "str")
    source = _mcs_source(table_ref, path.parent)
    if mcs_table is None:
        mcs_table = _build("mcs_table", load_mcs_table, source)

    link = parse_link(root.section("link"))
    ground = parse_radio(root.section("ground_radio"))
    drone = parse_radio(root.section("drone_radio"))

    ap_sec = root.section("ap", required=False)
    if ap_sec is not None:
        ap = _build(ap_sec.path, ApConfig, boresight=ap_sec.get("boresight", "vec3", (0.0, 0.0, 1.0)))
        max_rate = ap_sec.get("max_tracking_rate_deg_s", "number?", math.inf)
        ap_sec.done()
    else:
        ap, max_rate = ApConfig(), math.inf

    gimbal_sec = root.section("gimbal", required=False)
    if gimbal_sec is not None:
        gimbal_enabled = gimbal_sec.get("enabled", "bool", True)
        gimbal = _build(
            gimbal_sec.path,
            GimbalState,
            roll_deg=gimbal_sec.get("initial_roll_deg", "number", 0.0),
            rate_limit_deg_s=gimbal_sec.get("rate_limit_deg_s", "number", 90.0),
        )
        gimbal_sec.done()
    else:
        gimbal_enabled, gimbal = True, GimbalState()

    trajectory = parse_trajectory(root.section("trajectory"))
    video = parse_video(root.section("video"))
    codec = parse_codec(root.section("codec", required=False))

    queue_sec = root.section("queue", required=False)
    if queue_sec is not None:
        max_queue_bits = queue_sec.get("max_queue_bits", "number", 8e9)
        deadline = queue_sec.get("frame_deadline_s", "number?", 1.0)
        policy = queue_sec.get("overflow_policy", "str", DROP_NEWEST)
        queue_sec.done()
    else:
        max_queue_bits, deadline, policy = 8e9, 1.0, DROP_NEWEST

    power_sec = root.section("power")
    power = _build(
        power_sec.path,
        PowerModel,
        rx_idle_w=power_sec.get("rx_idle_w", "number"),
        rx_active_w=power_sec.get("rx_active_w", "number"),
        drone_base_w=power_sec.get("drone_base_w", "number"),
        drone_radio_w=power_sec.get("drone_radio_w", "number"),
        drone_ai_w=power_sec.get("drone_ai_w", "number"),
    )
    power_sec.done()

    calibration = scene = None
    det_sec = root.section("detection", required=False)
    if det_sec is not None:
        calibration = parse_calibration(det_sec.section("calibration", required=False))
        camera = _build(
            det_sec.path,
            det.Camera,
            video,
            det_sec.get("horizontal_fov_deg", "number"),
        )
        scene = det.FaceScene(parse_faces(det_sec), camera)
        det_sec.done()
    root.done()

    return _build(
        "scenario",
        Scenario,
        mcs_table=mcs_table,
        trajectory=trajectory,
        duration_s=duration,
        link=link,
        ground_hw=ground,
        drone_hw=drone,
        ap=ap,
        gimbal=gimbal,
        gimbal_enabled=gimbal_enabled,
        video=video,
        codec=codec,
        power=power,
        detection=calibration,
        scene=scene,
        channel_sample_dt_s=dt if dt is not None else sample_dt,
        max_queue_bits=max_queue_bits,
        frame_deadline_s=deadline,
        overflow_policy=policy,
        placement=placement,
        max_tracking_rate_deg_s=max_rate,
        mcs_hysteresis_db=hysteresis,
        name=name,
    )


@dataclass(frozen=True)
class DistanceSweep:
    name: str
    link: LinkBudgetParams
    gains_dbi: tuple[float, ...]
    snr_start_db: float
    snr_stop_db: float
    snr_step_db: float


def snr_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive ascending grid; ``stop`` must not be below ``start``."""
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise ValidationError("snr_db", "range bounds must be finite")
    if stop < start:
        raise ValidationError("snr_db", f"range must be ascending, got {start} .. {stop}")
    if start == stop:
        return [start]
    if not step > 0:
        raise ValidationError("snr_db.step", "must be > 0")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [start + k * step for k in range(n + 1)]


def parse_distance_sweep(path: Union[str, Path]) -> DistanceSweep:
    path = resolve_document(path)
    data = read_document(path)
    if document_kind(data) != DISTANCE_SWEEP:
        raise ConfigError("kind", f"{path} is not a distance_sweep document")
    root = _Section(data, "")
    root.get("kind", "str")
    name = root.get("name", "str", path.stem)
    link = parse_link(root.section("link"))
    gains = tuple(root.get("gains_dbi", "numbers"))
    snr = root.section("snr_db")
    start, stop = snr.get("start", "number"), snr.get("stop", "number")
    step = snr.get("step", "number", 1.0)
    snr.done()
    root.done()
    snr_grid(start, stop, step)
    return DistanceSweep(name, link, gains, start, stop, step)


@dataclass(frozen=True)
class FaceSceneDocument:
    name: str
    calibration: det.DetectionCalibration
    cameras: tuple[det.Camera, ...]
    faces: tuple[det.Face, ...]

    def scene(self, camera: det.Camera) -> det.FaceScene:
        return det.FaceScene(self.faces, camera)


REQUIRED_CAMERAS = ("2K", "4K")


def parse_face_scene(path: Union[str, Path]) -> FaceSceneDocument:
    path = resolve_document(path)
    data = read_document(path)
    if document_kind(data) != FACE_SCENE:
        raise ConfigError("kind", f"{path} is not a face_scene document")
    root = _Section(data, "")
    root.get("kind", "str")
    name = root.get("name", "str", path.stem)
    calibration = parse_calibration(root.section("calibration", required=False))
    cameras = []
    for item in root.items("cameras"):
        profile = _build(
            item.path,
            VideoProfile,
            width=item.get("width_px", "int"),
            height=item.get("height_px", "int"),
            fps=item.get("fps", "number", 0.0),
            bits_per_pixel=item.get("bits_per_pixel", "int", 24),
        )
        cameras.append(
            _build(
                item.path,
                det.Camera,
                profile,
                item.get("horizontal_fov_deg", "number"),
                item.get("label", "str"),
            )
        )
        item.done()
    faces = parse_faces(root)
    root.done()
    labels = [c.label for c in cameras]
    for required in REQUIRED_CAMERAS:
        if required not in labels:
            raise ConfigError("cameras", f"missing the {required} camera profile")
    if len(set(labels)) != len(labels):
        raise ConfigError("cameras", "camera labels must be unique")
    return FaceSceneDocument(name, calibration, tuple(cameras), faces)
