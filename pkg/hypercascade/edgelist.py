# SPDX-License-Identifier: GPL-2.0-only

"""
Reading and writing TSV edge lists.

One triple per line: row<TAB>col<TAB>value, with decimal unsigned row and
column, a decimal signed value, no header, ASCII, newline terminated.
"""

import logging
import re

import numpy as np

import hypersparse
from monoids import INT64_MAX, INT64_MIN

logger = logging.getLogger("hypercascade." + __name__)

_line_re = re.compile(r"(\d+)\t(\d+)\t(-?\d+)", re.ASCII)


class EdgeListError(ValueError):
    """
    Raised for a line of an edge list that can't be ingested.
    """

    def __init__(self, message, lineno):
        super().__init__("line {}: {}".format(lineno, message))
        self.lineno = lineno


def read_batches(path, batch_size, nrows, ncols):
    """
    Yields EdgeBatch objects of up to batch_size triples read from a TSV edge
    list. Raises EdgeListError naming the 1-based line number of the first
    malformed or out-of-range line; batches before that line have already
    been yielded.

    path: str
        The edge list to read.
    batch_size: int
        The largest number of triples per batch.
    nrows: int
        Rows must be below this.
    ncols: int
        Columns must be below this.
    """
    rows, cols, vals = [], [], []
    with open(path, "rb") as edges:
        for lineno, raw in enumerate(edges, start=1):
            try:
                line = raw.decode("ascii")
            except UnicodeDecodeError:
                raise EdgeListError("is not ASCII", lineno) from None
            row, col, val = parse_line(line, lineno)
            if row >= nrows or col >= ncols:
                raise EdgeListError(
                    "({}, {}) is outside the {} x {} matrix".format(
                        row, col, nrows, ncols
                    ),
                    lineno
                )
            rows.append(row)
            cols.append(col)
            vals.append(val)
            if len(rows) == batch_size:
                yield _to_batch(rows, cols, vals)
                rows, cols, vals = [], [], []
    if rows:
        yield _to_batch(rows, cols, vals)


def parse_line(line, lineno):
    """
    Parses one edge list line into (row, col, value).
    """
    text = line[:-1] if line.endswith("\n") else line
    if text.endswith("\r"):
        text = text[:-1]
    matched = _line_re.fullmatch(text)
    if not matched:
        raise EdgeListError("expected row<TAB>col<TAB>value, got {!r}".format(
            text[:80]
        ), lineno)
    row, col, val = (int(group) for group in matched.groups())
    if row > hypersparse.UINT64_MAX or col > hypersparse.UINT64_MAX:
        raise EdgeListError("index does not fit in 64 bits", lineno)
    if not INT64_MIN <= val <= INT64_MAX:
        raise EdgeListError("value {} does not fit in int64".format(val),
                            lineno)
    return row, col, val


def _to_batch(rows, cols, vals):
    return hypersparse.EdgeBatch(np.array(rows, dtype=np.uint64),
                                 np.array(cols, dtype=np.uint64),
                                 np.array(vals, dtype=np.int64))


def format_batch(batch):
    """
    Returns the batch's triples as TSV text (newline terminated).
    """
    if not len(batch):
        return ""
    lines = map("{}\t{}\t{}".format, batch.rows.tolist(), batch.cols.tolist(),
                batch.vals.tolist())
    return "\n".join(lines) + "\n"


def write_batches(path, batches):
    """
    Writes batches to a TSV edge list and returns the number of triples
    written.
    """
    written = 0
    with open(path, "w", encoding="ascii", newline="\n") as edges:
        for batch in batches:
            edges.write(format_batch(batch))
            written += len(batch)
    return written
