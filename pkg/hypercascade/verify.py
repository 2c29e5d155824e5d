# SPDX-License-Identifier: GPL-2.0-only

"""
Checks a hierarchy against the flat oracle: the same stream is ingested into
a HierarchicalMatrix batch by batch and built in one step into a single
HypersparseMatrix, and the two must hold identical entries.
"""

import dataclasses
import logging

import hierarchy
import hypersparse
import monoids
import streamgen
from bench import BenchConfigError

logger = logging.getLogger("hypercascade." + __name__)

DEFAULT_MAX_TRIPLES = 10**6


@dataclasses.dataclass
class VerifyReport:
    triples: int
    batches: int
    cuts: list
    nnz: int
    layer_nnz: list
    cascades_per_level: list
    entries_promoted_per_level: list
    first_difference: tuple = None
    # (batch index, layer nnz) after the first update that left a layer
    # above its cut
    quiescence_violation: tuple = None

    @property
    def passed(self):
        return self.first_difference is None and self.quiescence_violation is None

    def describe(self):
        """
        Returns human readable result lines.
        """
        lines = [
            "{} triples in {} batches, cuts {}".format(self.triples,
                                                       self.batches, self.cuts),
            "flattened nnz {}; layer nnz {}".format(self.nnz, self.layer_nnz),
        ]
        for level, (cascades, promoted) in enumerate(zip(
                self.cascades_per_level, self.entries_promoted_per_level)):
            lines.append("level {}: {} cascades, {} entries promoted".format(
                level + 1, cascades, promoted
            ))
        if self.quiescence_violation is not None:
            lines.append("FAIL: after batch {} layer nnz {} exceeds cuts "
                         "{}".format(*self.quiescence_violation, self.cuts))
        if self.first_difference is not None:
            lines.append("FAIL: first difference at ({}, {}): hierarchy {} "
                         "!= oracle {}".format(*self.first_difference))
        if self.passed:
            lines.append("PASS")
        return lines


def run_verify(stream, cuts, value_type="int64",
               max_triples=DEFAULT_MAX_TRIPLES, tamper=None):
    """
    Ingests the stream into a hierarchy and the flat oracle and compares
    them. Returns a VerifyReport; raises BenchConfigError for streams over
    max_triples.

    stream: streamgen.StreamConfig
        The stream to ingest.
    cuts: hierarchy.CutSchedule
        The hierarchy's cut schedule; empty for a single layer.
    value_type: str
        "int64" or "float64".
    max_triples: int
        The largest stream the oracle is built for.
    tamper: callable, None
        Called with the HierarchicalMatrix after ingest and before the
        comparison; used to check that corruption is caught.
    """
    total = stream.total_triples()
    if total > max_triples:
        raise BenchConfigError(
            "verify builds the whole stream in memory twice; {} triples is "
            "over the {} limit".format(total, max_triples)
        )
    monoid = monoids.for_value_type(value_type)
    dimension = stream.dimension()
    matrix = hierarchy.HierarchicalMatrix(dimension, dimension, cuts, monoid)

    batches = []
    violation = None
    for batch_index, batch in enumerate(streamgen.iter_batches(stream)):
        matrix.update(batch)
        if violation is None and not matrix.is_quiescent():
            violation = (batch_index, matrix.layer_nnz())
        batches.append(batch)

    oracle = hypersparse.HypersparseMatrix.build(
        dimension, dimension, hypersparse.EdgeBatch.concat(batches), monoid
    )
    if tamper is not None:
        tamper(matrix)
    flattened = matrix.flatten()
    stats = matrix.stats()

    report = VerifyReport(
        triples=total,
        batches=stream.num_batches,
        cuts=list(matrix.cuts),
        nnz=flattened.nnz(),
        layer_nnz=matrix.layer_nnz(),
        cascades_per_level=list(stats.cascades_per_level),
        entries_promoted_per_level=list(stats.entries_promoted_per_level),
        first_difference=flattened.first_difference(oracle),
        quiescence_violation=violation,
    )
    logger.debug("Verify %s: %s", "passed" if report.passed else "failed",
                 report)
    return report
