import pytest

import ingest
from edgelist import EdgeListError
from hierarchy import CutSchedule

DIMS = (2**32, 2**32)


def test_ingest_folds_duplicates(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("0\t1\t5\n0\t2\t3\n0\t1\t2\n")
    summary = ingest.run_ingest(path, CutSchedule(), DIMS)
    assert summary.triples == 3
    assert summary.nnz == 2
    assert summary.value_sum == 10
    assert summary.top_rows == [(0, 10)]
    assert summary.top_cols == [(1, 7), (2, 3)]
    assert summary.network.max_link_packets == 7
    assert summary.layer_nnz == [2, 0, 0, 0]


def test_ingest_cascades_with_small_batches(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("".join("{}\t0\t1\n".format(i) for i in range(10)))
    summary = ingest.run_ingest(path, CutSchedule([3]), DIMS, batch_size=2)
    assert summary.nnz == 10
    assert sum(summary.layer_nnz) == 10
    assert summary.layer_nnz[0] <= 3
    assert summary.top_cols == [(0, 10)]


def test_ingest_empty_file(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("")
    summary = ingest.run_ingest(path, CutSchedule(), DIMS)
    assert summary.triples == 0
    assert summary.nnz == 0
    assert summary.updates_per_second == 0
    assert summary.top_rows == []


def test_ingest_bad_line(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("a\tb\tc\n")
    with pytest.raises(EdgeListError) as excinfo:
        ingest.run_ingest(path, CutSchedule(), DIMS)
    assert excinfo.value.lineno == 1


def test_ingest_missing_file(tmp_path):
    with pytest.raises(OSError):
        ingest.run_ingest(tmp_path / "missing.tsv", CutSchedule(), DIMS)


def test_describe(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("0\t1\t5\n")
    lines = ingest.run_ingest(path, CutSchedule(), DIMS, top_k=1).describe()
    assert lines[2] == "top row sums: 0->5"
    assert "unique_links: 1" in lines
