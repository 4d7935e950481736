"""SNR to MCS mapping and usable link capacity.

An MCS is usable when the SNR reaches its threshold; thresholds are the
negated EVM requirements of the standard, so the table is data rather than
code. A missing link is ``None`` throughout, never a zero-rate row.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import ValidationError

MCS_COLUMNS = ("index", "label", "min_snr_db", "phy_rate_mbps")
DEFAULT_MCS_TABLE = "mcs_80211ad_sc.csv"


@dataclass(frozen=True)
class McsEntry:
    index: int
    label: str
    min_snr_db: float
    phy_rate_bps: float

    def __post_init__(self):
        if self.index < 1:
            raise ValidationError("McsEntry.index", f"must be >= 1, got {self.index}")
        if not math.isfinite(self.min_snr_db):
            raise ValidationError("McsEntry.min_snr_db", "must be finite")
        if not (self.phy_rate_bps > 0 and math.isfinite(self.phy_rate_bps)):
            raise ValidationError("McsEntry.phy_rate_bps", f"must be > 0, got {self.phy_rate_bps}")


@dataclass(frozen=True)
class McsTable:
    entries: tuple[McsEntry, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValidationError("McsTable.entries", "table is empty")
        indices = [e.index for e in entries]
        if len(set(indices)) != len(indices):
            raise ValidationError("McsTable.entries", "duplicate MCS index")
        for lo, hi in zip(entries, entries[1:]):
            if not hi.min_snr_db > lo.min_snr_db:
                raise ValidationError(
                    "McsTable.entries",
                    f"min_snr_db not strictly ascending at MCS {hi.index}",
                )
            if not hi.phy_rate_bps > lo.phy_rate_bps:
                raise ValidationError(
                    "McsTable.entries",
                    f"phy_rate not strictly ascending at MCS {hi.index}",
                )
        object.__setattr__(self, "_thresholds", [e.min_snr_db for e in entries])

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def by_index(self, index: int) -> McsEntry:
        for e in self.entries:
            if e.index == index:
                return e
        raise KeyError(index)


@dataclass(frozen=True)
class RadioHardware:
    antenna_gain_dbi: float
    scan_az_deg: float
    scan_el_deg: float
    max_throughput_bps: float

    def __post_init__(self):
        if not self.scan_az_deg > 0:
            raise ValidationError("RadioHardware.scan_az_deg", "must be > 0")
        if not self.scan_el_deg > 0:
            raise ValidationError("RadioHardware.scan_el_deg", "must be > 0")
        if not self.max_throughput_bps > 0:
            raise ValidationError("RadioHardware.max_throughput_bps", "must be > 0")
        if not math.isfinite(self.antenna_gain_dbi):
            raise ValidationError("RadioHardware.antenna_gain_dbi", "must be finite")


# The 1.5 Gbit/s ceiling belongs to the radio unit behind either antenna.
LENS_ANTENNA = RadioHardware(25.4, 13.5, 7.0, 1.5e9)
ARRAY_ANTENNA = RadioHardware(17.5, 49.0, 19.5, 1.5e9)
HARDWARE_PROFILES = {"lens": LENS_ANTENNA, "array": ARRAY_ANTENNA}


def parse_mcs_table(text: str, source: str = "<mcs table>") -> McsTable:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValidationError("McsTable.entries", f"{source}: no header or rows")
    reader = csv.reader(io.StringIO("\n".join(lines)))
    header = [h.strip() for h in next(reader)]
    missing = [c for c in MCS_COLUMNS if c not in header]
    if missing:
        raise ValidationError("McsTable", f"{source}: missing column(s) {', '.join(missing)}")
    col = {name: header.index(name) for name in MCS_COLUMNS}
    entries = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise ValidationError("McsTable", f"{source}: row {lineno} has {len(row)} fields")
        try:
            entries.append(
                McsEntry(
                    index=int(row[col["index"]]),
                    label=row[col["label"]].strip(),
                    min_snr_db=float(row[col["min_snr_db"]]),
                    phy_rate_bps=float(row[col["phy_rate_mbps"]]) * 1e6,
                )
            )
        except ValueError as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError("McsTable", f"{source}: row {lineno}: {exc}") from None
    return McsTable(tuple(entries))


def load_mcs_table(source: Union[str, Path, None] = None) -> McsTable:
    """Load a table file; ``None`` loads the shipped 802.11ad SC table."""
    if source is None:
        text = resources.files("mmdrone.data").joinpath(DEFAULT_MCS_TABLE).read_text()
        return parse_mcs_table(text, DEFAULT_MCS_TABLE)
    path = Path(source)
    return parse_mcs_table(path.read_text(), str(path))


def select_mcs(
    table: McsTable,
    snr_db: float,
    current: Optional[McsEntry] = None,
    hysteresis_db: float = 0.0,
) -> Optional[McsEntry]:
    """Highest MCS whose threshold is <= ``snr_db``, or None for no link.

    With ``hysteresis_db`` > 0 and a ``current`` entry, switching to a higher
    MCS additionally needs ``hysteresis_db`` of margin over its threshold.
    """
    pos = bisect.bisect_right(table._thresholds, snr_db)
    if pos == 0:
        return None
    best = table.entries[pos - 1]
    if hysteresis_db > 0 and current is not None and best.min_snr_db > current.min_snr_db:
        pos = bisect.bisect_right(table._thresholds, snr_db - hysteresis_db)
        damped = table.entries[pos - 1] if pos else None
        # never fall below the current entry while its own threshold still holds
        if damped is None or damped.min_snr_db < current.min_snr_db:
            return current
        return damped
    return best


def capacity_bps(entry: Optional[McsEntry], hardware: RadioHardware) -> float:
    if entry is None:
        return 0.0
    return min(entry.phy_rate_bps, hardware.max_throughput_bps)


def table_from_rows(rows: Iterable[tuple[int, str, float, float]]) -> McsTable:
    """Build a table from (index, label, min_snr_db, phy_rate_bps) tuples."""
    return McsTable(tuple(McsEntry(*row) for row in rows))
