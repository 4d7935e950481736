"""Statistical face-detector stand-in.

Detection probability is a function of the face's apparent width in pixels,
piecewise linear in log2(width) through calibration anchors and clamped to
[0, 1]. The default anchors pin 2K and 4K capture of the same scene (4K
doubles every face's pixel width) to the measured recognition rates of
45.5 and 86.2 faces out of 136.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, ValidationError
from .video import VideoProfile

FACES_IN_SCENE = 136
RATE_2K = 45.5 / FACES_IN_SCENE
RATE_4K = 86.2 / FACES_IN_SCENE


@dataclass(frozen=True)
class DetectionCalibration:
    """Anchors are (face_pixel_width, detection_rate) pairs.

    ``quality_factor`` (<= 1) scales every effective pixel width; it is the
    hook for modelling compression damage. ``compression_exponent`` couples
    it to a codec ratio as ratio**-exponent and defaults to no effect.
    """

    anchors: tuple[tuple[float, float], ...] = ((12.0, RATE_2K), (24.0, RATE_4K))
    min_face_px: float = 8.0
    quality_factor: float = 1.0
    compression_exponent: float = 0.0

    def __post_init__(self):
        anchors = tuple((float(px), float(p)) for px, p in self.anchors)
        object.__setattr__(self, "anchors", anchors)
        if len(anchors) < 2:
            raise ValidationError("DetectionCalibration.anchors", "need at least 2 anchors")
        for px, p in anchors:
            if not px > 0:
                raise ValidationError("DetectionCalibration.anchors", "pixel widths must be > 0")
            if not 0.0 <= p <= 1.0:
                raise ValidationError("DetectionCalibration.anchors", "rates must be in [0, 1]")
        for (px0, p0), (px1, p1) in zip(anchors, anchors[1:]):
            if not px1 > px0:
                raise ValidationError(
                    "DetectionCalibration.anchors", "pixel widths must be strictly increasing"
                )
            if p1 < p0:
                raise ValidationError("DetectionCalibration.anchors", "rates must be nondecreasing")
        if self.min_face_px < 0:
            raise ValidationError("DetectionCalibration.min_face_px", "must be >= 0")
        if not 0 < self.quality_factor <= 1:
            raise ValidationError("DetectionCalibration.quality_factor", "must be in (0, 1]")
        if self.compression_exponent < 0:
            raise ValidationError("DetectionCalibration.compression_exponent", "must be >= 0")

    @classmethod
    def from_2k_anchor(cls, anchor_2k_px: float = 12.0, **kwargs) -> "DetectionCalibration":
        return cls(anchors=((anchor_2k_px, RATE_2K), (2 * anchor_2k_px, RATE_4K)), **kwargs)

    def effective_quality(self, compression_ratio: float = 1.0) -> float:
        return self.quality_factor * compression_ratio ** (-self.compression_exponent)


@dataclass(frozen=True)
class Camera:
    profile: VideoProfile
    horizontal_fov_deg: float = 90.0
    label: str = ""

    def __post_init__(self):
        if not 0 < self.horizontal_fov_deg < 180:
            raise ValidationError("Camera.horizontal_fov_deg", "must be in (0, 180)")


@dataclass(frozen=True)
class Face:
    physical_width_m: float
    distance_m: float

    def __post_init__(self):
        if not self.physical_width_m > 0:
            raise ValidationError("Face.physical_width_m", "must be > 0")
        if not self.distance_m > 0:
            raise ValidationError("Face.distance_m", "must be > 0")


@dataclass(frozen=True)
class FaceScene:
    faces: tuple[Face, ...]
    camera: Camera = field(default_factory=lambda: Camera(VideoProfile()))

    def __post_init__(self):
        object.__setattr__(self, "faces", tuple(self.faces))

    def with_camera(self, camera: Camera) -> "FaceScene":
        return FaceScene(self.faces, camera)


def face_pixel_width(camera: Camera, face_width_m: float, distance_m: float) -> float:
    """Pinhole projection of a face onto the sensor's horizontal pixel count."""
    if not face_width_m > 0 or not distance_m > 0:
        raise DomainError("face width and distance must be positive")
    half_fov = math.radians(camera.horizontal_fov_deg) / 2.0
    return camera.profile.width * face_width_m / (2.0 * distance_m * math.tan(half_fov))


def detection_prob(cal: DetectionCalibration, face_px: float) -> float:
    if face_px < 0:
        raise DomainError(f"pixel width must be >= 0, got {face_px}")
    if face_px < cal.min_face_px or face_px == 0:
        return 0.0
    x = math.log2(face_px)
    xs = [math.log2(px) for px, _ in cal.anchors]
    ps = [p for _, p in cal.anchors]
    # end segments extend linearly before clamping
    if x <= xs[0]:
        i = 0
    elif x >= xs[-1]:
        i = len(xs) - 2
    else:
        i = next(k for k in range(len(xs) - 1) if xs[k] <= x <= xs[k + 1])
    w = (x - xs[i]) / (xs[i + 1] - xs[i])
    p = ps[i] + w * (ps[i + 1] - ps[i])
    return min(1.0, max(0.0, p))


def face_probabilities(
    cal: DetectionCalibration, scene: FaceScene, compression_ratio: float = 1.0
) -> list[float]:
    q = cal.effective_quality(compression_ratio)
    return [
        detection_prob(cal, q * face_pixel_width(scene.camera, f.physical_width_m, f.distance_m))
        for f in scene.faces
    ]


def expected_detections(
    cal: DetectionCalibration,
    scene: FaceScene,
    seed: Optional[int] = None,
    compression_ratio: float = 1.0,
) -> float:
    """Expected recognised faces; with ``seed`` a single Bernoulli realisation."""
    probs = face_probabilities(cal, scene, compression_ratio)
    if seed is None:
        return math.fsum(probs)
    rng = np.random.default_rng(seed)
    return float(np.count_nonzero(rng.random(len(probs)) < np.asarray(probs)))
