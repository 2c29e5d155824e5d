import pytest

import verify
from bench import BenchConfigError
from hierarchy import CutSchedule
from hypersparse import HypersparseMatrix
from streamgen import StreamConfig


@pytest.fixture
def stream():
    return StreamConfig(scale=14, batch_size=2000, num_batches=10, seed=3)


def test_verify_passes(stream):
    report = verify.run_verify(stream, CutSchedule([500, 4000]))
    assert report.passed
    assert report.triples == 20000
    assert report.batches == 10
    assert report.cuts == [500, 4000]
    assert sum(report.cascades_per_level) > 0
    assert report.describe()[-1] == "PASS"


def test_verify_single_layer(stream):
    report = verify.run_verify(stream, CutSchedule([]))
    assert report.passed
    assert report.cascades_per_level == [0]
    assert len(report.layer_nnz) == 1


def test_verify_float_values(stream):
    report = verify.run_verify(stream.replace(value_mode="random"),
                               CutSchedule([100]), value_type="float64")
    assert report.passed


def test_verify_catches_extra_entry(stream):
    def tamper(matrix):
        top = matrix.layers[-1]
        top.add_assign(HypersparseMatrix.build(top.nrows, top.ncols,
                                               [(0, 0, 1)]))

    report = verify.run_verify(stream, CutSchedule([500]), tamper=tamper)
    assert not report.passed
    row, col, ours, theirs = report.first_difference
    assert (row, col) == (0, 0)
    assert ours == (theirs or 0) + 1
    assert report.describe()[-1].startswith("FAIL: first difference at (0, 0)")


def test_verify_catches_lost_layer(stream):
    report = verify.run_verify(stream, CutSchedule([500, 4000]),
                               tamper=lambda matrix: matrix.layers[-1].clear())
    assert not report.passed
    assert report.first_difference is not None


def test_verify_too_large(stream):
    with pytest.raises(BenchConfigError):
        verify.run_verify(stream, CutSchedule(), max_triples=19999)
