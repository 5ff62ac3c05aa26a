import pytest
from hypothesis import given, settings, strategies as st

from ttpnr.fixtures import dummies_only
from ttpnr.instance import validate_instance
from ttpnr.oracle import random_instance
from ttpnr.psplib_io import PspLibParseError, parse_optima, parse_sm, read_sm, write_sm


def test_example1_fixture_parses_to_example1(ex1, data_dir):
    assert read_sm(data_dir / "example1.sm") == ex1


def test_j301_1_shape(data_dir):
    inst = read_sm(data_dir / "j301_1.sm")
    assert inst.n_activities == 32
    assert inst.n_resources == 4
    assert inst.capacities == (12, 13, 4, 12)
    assert inst.name == "j301_1"
    assert validate_instance(inst) == []
    # job 1 -> jobs 2, 3, 4 after remapping to 0-based ids
    assert inst.successors[0] == (1, 2, 3)
    assert inst.activities[1].duration == 8 and inst.activities[1].demands == (4, 0, 0, 0)


def test_multi_mode_rejected(data_dir):
    with pytest.raises(PspLibParseError, match="multi-mode unsupported") as err:
        read_sm(data_dir / "Jall1_1.mm")
    assert err.value.line == 10


def test_two_mode_job_rejected(data_dir):
    text = (data_dir / "example1.sm").read_text().replace(
        "   2        1          1           3", "   2        2          1           3"
    )
    with pytest.raises(PspLibParseError, match="multi-mode"):
        parse_sm(text)


def test_missing_section(data_dir):
    text = (data_dir / "example1.sm").read_text().replace("RESOURCEAVAILABILITIES:", "SOMETHING:")
    with pytest.raises(PspLibParseError, match="missing section RESOURCEAVAILABILITIES"):
        parse_sm(text)


def test_malformed_row_reports_line(data_dir):
    lines = (data_dir / "example1.sm").read_text().splitlines()
    idx = next(i for i, l in enumerate(lines) if l.startswith("  3      1"))
    lines[idx] = "  3      1     x       1"
    with pytest.raises(PspLibParseError) as err:
        parse_sm("\n".join(lines))
    assert err.value.line == idx + 1


def test_job_count_mismatch(data_dir):
    text = (data_dir / "example1.sm").read_text().replace(
        "jobs (incl. supersource/sink ):  6", "jobs (incl. supersource/sink ):  7"
    )
    with pytest.raises(PspLibParseError, match="job count mismatch"):
        parse_sm(text)


def test_round_trip_example1(ex1):
    assert parse_sm(write_sm(ex1)) == ex1


def test_round_trip_dummies_only():
    inst = dummies_only()
    assert parse_sm(write_sm(inst)) == inst


def test_round_trip_j301_1(data_dir):
    inst = read_sm(data_dir / "j301_1.sm")
    assert parse_sm(write_sm(inst)) == inst


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(0, 15), k=st.integers(1, 4))
def test_round_trip_random(seed, n, k):
    inst = random_instance(seed, n, k, 9, 0.5)
    assert parse_sm(write_sm(inst)) == inst


def test_optima_excerpt(data_dir):
    table = parse_optima((data_dir / "j30opt_excerpt.sm").read_text())
    assert table == {"j301_1": 43}


def test_optima_empty():
    assert parse_optima("") == {}


def test_optima_duplicate_key():
    with pytest.raises(PspLibParseError, match="duplicate"):
        parse_optima("1 1 43\n1 1 44\n")


def test_optima_malformed_row():
    with pytest.raises(PspLibParseError) as err:
        parse_optima("header\n1 2\n")
    assert err.value.line == 2
