"""Free-space link budget for the 60 GHz drone uplink.

Everything here is a pure function of its arguments. Antenna gains are
applied at both ends of the link and the only propagation impairment is
free-space path loss (no multipath, no oxygen or rain absorption).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, UnreachableError, ValidationError

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact

# Loss returned for orthogonal linear polarizations; propagates to SNR = -inf
# and therefore to a zero-capacity step.
POLARIZATION_BLOCKED = math.inf


@dataclass(frozen=True)
class LinkBudgetParams:
    carrier_freq_hz: float = 60e9
    bandwidth_hz: float = 2.16e9
    tx_power_dbm: float = 10.0
    tx_gain_dbi: float = 25.4
    rx_gain_dbi: float = 25.4
    noise_density_dbm_per_hz: float = -174.0
    noise_figure_db: float = 10.0
    misc_loss_db: float = 0.0

    def __post_init__(self):
        for name in (
            "carrier_freq_hz", "bandwidth_hz", "tx_power_dbm", "tx_gain_dbi",
            "rx_gain_dbi", "noise_density_dbm_per_hz", "noise_figure_db", "misc_loss_db",
        ):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"LinkBudgetParams.{name}", "must be finite")
        if self.carrier_freq_hz <= 0:
            raise ValidationError("LinkBudgetParams.carrier_freq_hz", "must be > 0")
        if self.bandwidth_hz <= 0:
            raise ValidationError("LinkBudgetParams.bandwidth_hz", "must be > 0")
        if self.misc_loss_db < 0:
            raise ValidationError("LinkBudgetParams.misc_loss_db", "must be >= 0")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq_hz


def fspl_db(distance_m: float, carrier_freq_hz: float) -> float:
    """Free-space path loss 20*log10(4*pi*d/lambda) in dB."""
    if not distance_m > 0:
        raise DomainError(f"distance must be positive, got {distance_m!r}")
    if not carrier_freq_hz > 0:
        raise DomainError(f"carrier frequency must be positive, got {carrier_freq_hz!r}")
    wavelength = SPEED_OF_LIGHT / carrier_freq_hz
    return 20.0 * math.log10(4.0 * math.pi * distance_m / wavelength)


def noise_power_dbm(params: LinkBudgetParams) -> float:
    """Thermal noise over the channel bandwidth plus receiver noise figure."""
    return (
        params.noise_density_dbm_per_hz
        + 10.0 * math.log10(params.bandwidth_hz)
        + params.noise_figure_db
    )


def _budget_db(params: LinkBudgetParams) -> float:
    # Everything in the SNR except the distance-dependent path loss.
    return (
        params.tx_power_dbm
        + params.tx_gain_dbi
        + params.rx_gain_dbi
        - params.misc_loss_db
        - noise_power_dbm(params)
    )


def snr_db(params: LinkBudgetParams, distance_m: float, extra_loss_db: float = 0.0) -> float:
    """Received SNR at ``distance_m``.

    ``extra_loss_db`` carries time-varying losses such as polarization
    mismatch. An infinite extra loss (blocked polarization) yields -inf.
    """
    if extra_loss_db < 0 or math.isnan(extra_loss_db):
        raise DomainError(f"extra loss must be >= 0 dB, got {extra_loss_db!r}")
    return _budget_db(params) - fspl_db(distance_m, params.carrier_freq_hz) - extra_loss_db


def max_distance_m(params: LinkBudgetParams, target_snr_db: float) -> float:
    """Largest distance at which ``snr_db`` still reaches ``target_snr_db``.

    Closed-form inverse of the free-space law. Raises UnreachableError when
    the target needs a path loss the model cannot go below (non-finite target
    or a distance that underflows to zero).
    """
    if math.isnan(target_snr_db) or target_snr_db == math.inf:
        raise UnreachableError(f"target SNR {target_snr_db!r} dB is unreachable")
    allowed_loss_db = _budget_db(params) - target_snr_db
    distance = params.wavelength_m / (4.0 * math.pi) * 10.0 ** (allowed_loss_db / 20.0)
    if not distance > 0:
        raise UnreachableError(
            f"target SNR {target_snr_db} dB is above the model's short-range limit"
        )
    if math.isinf(distance):
        raise UnreachableError(f"target SNR {target_snr_db} dB overflows the distance range")
    return distance


def polarization_loss_db(mismatch_deg: float) -> float:
    """Power loss of a linear-polarization mismatch, -20*log10(cos(angle)).

    The angle must already be folded into [0, 90] degrees. Exactly 90 degrees
    returns POLARIZATION_BLOCKED.
    """
    if not 0.0 <= mismatch_deg <= 90.0:
        raise DomainError(f"mismatch must be within [0, 90] deg, got {mismatch_deg!r}")
    if mismatch_deg == 90.0:
        return POLARIZATION_BLOCKED
    if mismatch_deg == 0.0:
        return 0.0
    return -20.0 * math.log10(math.cos(math.radians(mismatch_deg)))


def is_blocked(loss_db: float) -> bool:
    return loss_db == POLARIZATION_BLOCKED
