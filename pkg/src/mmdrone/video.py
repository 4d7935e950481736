"""Camera stream model: raw frame sizes, generation instants, codec effects."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

UNCOMPRESSED = "uncompressed"
COMPRESSED = "compressed"


@dataclass(frozen=True)
class VideoProfile:
    width: int = 3840
    height: int = 2160
    fps: float = 7.5
    bits_per_pixel: int = 24

    def __post_init__(self):
        if self.width < 1:
            raise ValidationError("VideoProfile.width", f"must be >= 1, got {self.width}")
        if self.height < 1:
            raise ValidationError("VideoProfile.height", f"must be >= 1, got {self.height}")
        if not (self.fps >= 0 and math.isfinite(self.fps)):
            raise ValidationError("VideoProfile.fps", f"must be >= 0, got {self.fps}")
        if self.bits_per_pixel < 1:
            raise ValidationError(
                "VideoProfile.bits_per_pixel", f"must be >= 1, got {self.bits_per_pixel}"
            )


@dataclass(frozen=True)
class CodecModel:
    """Single-ratio codec abstraction. Uncompressed mode must be a no-op."""

    mode: str = UNCOMPRESSED
    compression_ratio: float = 1.0
    encode_latency_s: float = 0.0
    decode_latency_s: float = 0.0
    encode_power_w: float = 0.0
    decode_power_w: float = 0.0

    def __post_init__(self):
        if self.mode not in (UNCOMPRESSED, COMPRESSED):
            raise ValidationError("CodecModel.mode", f"unknown mode {self.mode!r}")
        for name in ("encode_latency_s", "decode_latency_s", "encode_power_w", "decode_power_w"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ValidationError(f"CodecModel.{name}", f"must be >= 0, got {value}")
        if not self.compression_ratio >= 1:
            raise ValidationError(
                "CodecModel.compression_ratio", f"must be >= 1, got {self.compression_ratio}"
            )
        if self.mode == UNCOMPRESSED:
            if self.compression_ratio != 1:
                raise ValidationError(
                    "CodecModel.compression_ratio", "must be 1 when mode is uncompressed"
                )
            for name in ("encode_latency_s", "decode_latency_s", "encode_power_w", "decode_power_w"):
                if getattr(self, name) != 0:
                    raise ValidationError(f"CodecModel.{name}", "must be 0 when mode is uncompressed")


def raw_bitrate_bps(profile: VideoProfile) -> float:
    return profile.width * profile.height * profile.fps * profile.bits_per_pixel


def frame_size_bits(profile: VideoProfile, codec: CodecModel = CodecModel()) -> float:
    raw = profile.width * profile.height * profile.bits_per_pixel
    if codec.mode == UNCOMPRESSED:
        return float(raw)
    return raw / codec.compression_ratio


def frame_times_s(profile: VideoProfile, duration_s: float) -> list[float]:
    """Generation instants k/fps on the half-open interval [0, duration_s)."""
    if duration_s < 0:
        raise ValidationError("duration_s", f"must be >= 0, got {duration_s}")
    if profile.fps == 0 or duration_s == 0:
        return []
    times = []
    k = 0
    while True:
        t = k / profile.fps
        if t >= duration_s:
            return times
        times.append(t)
        k += 1
