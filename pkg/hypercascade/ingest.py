# SPDX-License-Identifier: GPL-2.0-only

"""
Ingests a TSV edge list into a hierarchy and summarizes the resulting
traffic matrix.
"""

import dataclasses
import logging

import analytics
import edgelist
import hierarchy
import timers

logger = logging.getLogger("hypercascade." + __name__)

DEFAULT_BATCH_SIZE = 100000
DEFAULT_TOP_K = 10


@dataclasses.dataclass
class IngestSummary:
    path: str
    triples: int
    nnz: int
    value_sum: int
    top_rows: list
    top_cols: list
    seconds: float
    updates_per_second: int
    layer_nnz: list
    network: analytics.NetworkStats

    def describe(self):
        """
        Returns human readable summary lines.
        """
        lines = [
            "{}: {} triples in {:.3f} s ({} updates/s)".format(
                self.path, self.triples, self.seconds, self.updates_per_second
            ),
            "nnz {}, value sum {}, layer nnz {}".format(
                self.nnz, self.value_sum, self.layer_nnz
            ),
            "top row sums: " + ", ".join(
                "{}->{}".format(row, total) for row, total in self.top_rows
            ),
            "top col sums: " + ", ".join(
                "{}->{}".format(col, total) for col, total in self.top_cols
            ),
        ]
        lines.extend("{}: {}".format(name, value)
                     for name, value in self.network.as_dict().items())
        return lines


def run_ingest(path, cuts, dims, batch_size=DEFAULT_BATCH_SIZE,
               top_k=DEFAULT_TOP_K):
    """
    Streams an edge list into a HierarchicalMatrix in batches and returns an
    IngestSummary. Raises edgelist.EdgeListError naming the line of the
    first malformed or out-of-range triple, and OSError if the file can't be
    read.

    path: str
        The TSV edge list.
    cuts: hierarchy.CutSchedule
        The hierarchy's cut schedule.
    dims: (int, int)
        The matrix's rows and columns.
    batch_size: int
        Triples per update.
    top_k: int
        How many of the largest row and column sums to report.
    """
    nrows, ncols = dims
    matrix = hierarchy.HierarchicalMatrix(nrows, ncols, cuts)
    triples = 0
    recorder = timers.TimeRecorder()
    for batch in edgelist.read_batches(path, batch_size, nrows, ncols):
        matrix.update(batch)
        triples += len(batch)
    seconds = recorder.stop()

    flattened = matrix.flatten()
    summary = IngestSummary(
        path=str(path),
        triples=triples,
        nnz=flattened.nnz(),
        value_sum=flattened.value_sum(),
        top_rows=analytics.top_k(flattened.row_sums(), top_k),
        top_cols=analytics.top_k(flattened.col_sums(), top_k),
        seconds=seconds,
        updates_per_second=timers.rate(triples, seconds),
        layer_nnz=matrix.layer_nnz(),
        network=analytics.network_stats(flattened),
    )
    logger.info("Ingested %s triples from %s: nnz %s", triples, path,
                summary.nnz)
    return summary
