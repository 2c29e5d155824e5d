import numpy as np
import pytest

import edgelist
from edgelist import EdgeListError
from hypersparse import UINT64_MAX, EdgeBatch


def write(path, text):
    path.write_text(text, encoding="ascii")
    return path


def read_all(path, batch_size=100, nrows=2**32, ncols=2**32):
    return list(edgelist.read_batches(path, batch_size, nrows, ncols))


def test_parse_line():
    assert edgelist.parse_line("1\t2\t3\n", 1) == (1, 2, 3)
    assert edgelist.parse_line("1\t2\t-3", 1) == (1, 2, -3)
    assert edgelist.parse_line("0\t0\t0\r\n", 1) == (0, 0, 0)


@pytest.mark.parametrize("line", [
    "a\tb\tc\n",
    "1 2 3\n",
    "1\t2\n",
    "1\t2\t3\t4\n",
    "-1\t2\t3\n",
    "1\t2\t3.5\n",
    "\n",
])
def test_parse_line_rejects(line):
    with pytest.raises(EdgeListError) as excinfo:
        edgelist.parse_line(line, 7)
    assert excinfo.value.lineno == 7
    assert str(excinfo.value).startswith("line 7: ")


def test_parse_line_limits():
    assert edgelist.parse_line("{0}\t{0}\t1".format(UINT64_MAX), 1)[0] == \
        UINT64_MAX
    with pytest.raises(EdgeListError, match="64 bits"):
        edgelist.parse_line("{}\t0\t1".format(2**64), 1)
    with pytest.raises(EdgeListError, match="int64"):
        edgelist.parse_line("0\t0\t{}".format(2**63), 1)


def test_first_line_malformed(tmp_path):
    path = write(tmp_path / "bad.tsv", "a\tb\tc\n0\t1\t1\n")
    with pytest.raises(EdgeListError) as excinfo:
        read_all(path)
    assert excinfo.value.lineno == 1


def test_later_line_out_of_range(tmp_path):
    path = write(tmp_path / "range.tsv", "0\t1\t1\n2\t3\t1\n10\t0\t1\n")
    with pytest.raises(EdgeListError, match="outside the 10 x 10") as excinfo:
        read_all(path, nrows=10, ncols=10)
    assert excinfo.value.lineno == 3


def test_non_ascii_names_its_line(tmp_path):
    path = tmp_path / "latin.tsv"
    valid = "".join("{}\t{}\t1\n".format(i, i + 1) for i in range(500))
    path.write_bytes(valid.encode("ascii") + b"7\t1\t\xff\n")
    with pytest.raises(EdgeListError, match="not ASCII") as excinfo:
        read_all(path, batch_size=1000)
    assert excinfo.value.lineno == 501


def test_non_ascii_first_line(tmp_path):
    path = tmp_path / "utf.tsv"
    path.write_bytes("é\t1\t1\n0\t1\t1\n".encode("utf-8"))
    with pytest.raises(EdgeListError) as excinfo:
        read_all(path)
    assert excinfo.value.lineno == 1


def test_batches_split(tmp_path):
    path = write(tmp_path / "five.tsv",
                 "".join("{}\t{}\t1\n".format(i, i + 1) for i in range(5)))
    batches = read_all(path, batch_size=2)
    assert [len(batch) for batch in batches] == [2, 2, 1]
    assert batches[2].rows.tolist() == [4]
    assert batches[2].cols.tolist() == [5]


def test_empty_file(tmp_path):
    assert read_all(write(tmp_path / "empty.tsv", "")) == []


def test_format_batch():
    batch = EdgeBatch(np.array([1, 5]), np.array([2, 0]), np.array([3, -4]))
    assert edgelist.format_batch(batch) == "1\t2\t3\n5\t0\t-4\n"
    assert edgelist.format_batch(EdgeBatch.empty()) == ""


def test_write_then_read(tmp_path):
    batch = EdgeBatch.from_triples([(1, 2, 3), (UINT64_MAX - 1, 0, -9),
                                    (1, 2, 4)])
    path = tmp_path / "out.tsv"
    assert edgelist.write_batches(path, [batch, EdgeBatch.empty()]) == 3
    back = read_all(path, nrows=UINT64_MAX, ncols=UINT64_MAX)
    assert len(back) == 1
    assert list(back[0]) == list(batch)
