import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mmdrone.errors import ValidationError
from mmdrone.phy_mcs import (
    ARRAY_ANTENNA,
    LENS_ANTENNA,
    McsEntry,
    RadioHardware,
    capacity_bps,
    load_mcs_table,
    parse_mcs_table,
    select_mcs,
)

from helpers import linear_scan, random_table

HEADER = "index,label,min_snr_db,phy_rate_mbps\n"


def test_default_table_is_80211ad_sc():
    table = load_mcs_table()
    assert table.entries[-1].index == 12
    assert table.entries[-1].min_snr_db == 21.0
    assert table.entries[-1].phy_rate_bps == pytest.approx(4.62e9)
    assert [e.index for e in table] == [1, 2, 3, 4, 6, 7, 8, 9, 10, 11, 12]


def test_single_row_table():
    table = parse_mcs_table(HEADER + "12,16QAM 3/4,21,4620\n")
    assert len(table) == 1
    assert table.entries[0].phy_rate_bps == 4.62e9


def test_comments_are_skipped():
    table = parse_mcs_table("# note\n" + HEADER + "# row comment\n1,a,6,385\n")
    assert len(table) == 1


def test_empty_table_rejected():
    with pytest.raises(ValidationError):
        parse_mcs_table(HEADER)
    with pytest.raises(ValidationError):
        parse_mcs_table("")


def test_equal_thresholds_rejected():
    with pytest.raises(ValidationError, match="min_snr_db"):
        parse_mcs_table(HEADER + "1,a,10,100\n2,b,10,200\n")


def test_unsorted_rates_rejected():
    with pytest.raises(ValidationError, match="phy_rate"):
        parse_mcs_table(HEADER + "1,a,10,300\n2,b,11,200\n")


def test_duplicate_index_rejected():
    with pytest.raises(ValidationError, match="duplicate"):
        parse_mcs_table(HEADER + "1,a,10,100\n1,b,11,200\n")


def test_nonpositive_rate_rejected():
    with pytest.raises(ValidationError, match="phy_rate_bps"):
        parse_mcs_table(HEADER + "1,a,10,0\n")


def test_missing_column_rejected():
    with pytest.raises(ValidationError, match="phy_rate_mbps"):
        parse_mcs_table("index,label,min_snr_db\n1,a,10\n")


def test_bad_number_rejected():
    with pytest.raises(ValidationError, match="row 2"):
        parse_mcs_table(HEADER + "1,a,ten,100\n")


def test_select_at_threshold_is_inclusive():
    table = load_mcs_table()
    assert select_mcs(table, 21.0).index == 12
    assert select_mcs(table, 20.999).index == 11


def test_select_below_all_is_no_link():
    assert select_mcs(load_mcs_table(), -100.0) is None
    assert select_mcs(load_mcs_table(), -math.inf) is None


def test_select_top():
    assert select_mcs(load_mcs_table(), 1e9).index == 12


def test_capacity():
    table = load_mcs_table()
    assert capacity_bps(table.by_index(12), LENS_ANTENNA) == 1.5e9
    assert capacity_bps(None, ARRAY_ANTENNA) == 0.0
    entry = McsEntry(3, "x", 5.0, 1.0e9)
    assert capacity_bps(entry, LENS_ANTENNA) == 1.0e9


def test_hardware_profiles():
    assert (LENS_ANTENNA.antenna_gain_dbi, LENS_ANTENNA.scan_az_deg, LENS_ANTENNA.scan_el_deg) == (25.4, 13.5, 7.0)
    assert (ARRAY_ANTENNA.antenna_gain_dbi, ARRAY_ANTENNA.scan_az_deg, ARRAY_ANTENNA.scan_el_deg) == (17.5, 49.0, 19.5)
    with pytest.raises(ValidationError):
        RadioHardware(10, 0, 5, 1e9)


def test_hysteresis_holds_current_mcs():
    table = load_mcs_table()
    mcs11 = table.by_index(11)
    assert select_mcs(table, 21.5, current=mcs11, hysteresis_db=1.0).index == 11
    assert select_mcs(table, 22.0, current=mcs11, hysteresis_db=1.0).index == 12
    # dropping is never delayed
    assert select_mcs(table, 19.5, current=mcs11, hysteresis_db=1.0).index == 10


def test_select_matches_linear_scan_on_1000_random_tables():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        table = random_table(rng, int(rng.integers(1, 16)))
        lo, hi = table.entries[0].min_snr_db, table.entries[-1].min_snr_db
        probes = list(rng.uniform(lo - 5, hi + 5, size=8)) + [e.min_snr_db for e in table]
        for snr in probes:
            assert select_mcs(table, snr) == linear_scan(table, snr)


def rate(entry):
    return 0.0 if entry is None else entry.phy_rate_bps


@given(st.floats(-50, 60), st.floats(-50, 60))
def test_select_monotone(a, b):
    table = load_mcs_table()
    lo, hi = sorted((a, b))
    assert rate(select_mcs(table, lo)) <= rate(select_mcs(table, hi))


@given(st.floats(-50, 60), st.floats(min_value=1e6, max_value=1e10))
def test_capacity_never_exceeds_cap(snr, cap):
    hw = RadioHardware(10.0, 10.0, 10.0, cap)
    assert capacity_bps(select_mcs(load_mcs_table(), snr), hw) <= cap
