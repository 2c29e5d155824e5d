# SPDX-License-Identifier: GPL-2.0-only

"""
Hierarchical hypersparse matrices.

A hierarchical matrix is an ordered list of hypersparse layers A1 ... AN that
share dimensions, plus a cut ci for every layer but the last. Updates are
added to A1. Whenever a layer holds more than its cut (nnz(Ai) > ci) it is
added into the next layer and cleared, so most updates land in a small
matrix that stays in fast memory and the large layers are touched rarely.
The logical matrix is the sum of all the layers:

          +----+        nnz(A1) > c1        +--------+        nnz(A2) > c2
  batch ->| A1 | -------------------------> |   A2   | ------------------> ...
          +----+     A2 = A2 + A1; A1 = 0   +--------+

Thresholds are checked once per update call, after the whole batch has been
merged into A1. Layer N has no cut and grows without bound.
"""

import logging
import types

import hypersparse
import monoids

logger = logging.getLogger("hypercascade." + __name__)

# 4 layers; each cut is 16x the previous one and A1 stays around L2 size
DEFAULT_CUTS = (2**15, 2**19, 2**23)


class CutScheduleError(ValueError):
    """
    Raised for a cut schedule that isn't strictly increasing and positive.
    """


class CutSchedule(tuple):
    """
    The cuts c1 ... c(N-1) of an N-level hierarchy: strictly increasing
    positive integers. An empty schedule is a single flat layer.
    """

    def __new__(cls, cuts=DEFAULT_CUTS):
        cuts = tuple(cuts)
        for i, cut in enumerate(cuts):
            if isinstance(cut, bool) or not isinstance(cut, int):
                raise CutScheduleError("cut c{} = {!r} is not an integer".format(
                    i + 1, cut
                ))
            if cut < 1:
                raise CutScheduleError("cut c{} = {} must be positive".format(
                    i + 1, cut
                ))
            if cut > hypersparse.UINT64_MAX:
                raise CutScheduleError("cut c{} = {} exceeds 64 bits".format(
                    i + 1, cut
                ))
            if i and cut <= cuts[i - 1]:
                raise CutScheduleError(
                    "cuts must be strictly increasing, but c{} = {} <= c{} = "
                    "{}".format(i + 1, cut, i, cuts[i - 1])
                )
        return super().__new__(cls, cuts)

    @classmethod
    def parse(cls, text):
        """
        Parses a comma separated list of cuts; the empty string is an empty
        schedule (a single layer).

        >>> CutSchedule.parse("32768,524288")
        (32768, 524288)
        """
        text = text.strip()
        if not text:
            return cls(())
        try:
            return cls(int(part) for part in text.split(","))
        except ValueError as err:
            if isinstance(err, CutScheduleError):
                raise
            raise CutScheduleError("cuts {!r} are not a comma separated list "
                                   "of integers".format(text)) from None

    def levels(self):
        """
        Returns N, the number of layers this schedule describes.
        """
        return len(self) + 1

    def __repr__(self):
        return "CutSchedule({})".format(list(self))


class CascadeStats(types.SimpleNamespace):
    """
    Counters describing how updates moved through a hierarchy. All counters
    only ever increase.
    """

    def __init__(self, levels, updates_applied=0, cascades_per_level=None,
                 entries_promoted_per_level=None):
        """
        levels: int
            The number of layers.
        """
        self.updates_applied = updates_applied
        self.cascades_per_level = (list(cascades_per_level)
                                   if cascades_per_level is not None
                                   else [0] * levels)
        self.entries_promoted_per_level = (list(entries_promoted_per_level)
                                           if entries_promoted_per_level is not None
                                           else [0] * levels)

    def snapshot(self):
        """
        Returns an independent copy of the counters.
        """
        return CascadeStats(len(self.cascades_per_level),
                            self.updates_applied,
                            self.cascades_per_level,
                            self.entries_promoted_per_level)

    def as_dict(self):
        return {
            "updates_applied": self.updates_applied,
            "cascades_per_level": list(self.cascades_per_level),
            "entries_promoted_per_level": list(self.entries_promoted_per_level),
        }

    @classmethod
    def from_dict(cls, stats):
        return cls(len(stats["cascades_per_level"]),
                   stats["updates_applied"],
                   stats["cascades_per_level"],
                   stats["entries_promoted_per_level"])


class HierarchicalMatrix:
    """
    An N-level hierarchical hypersparse matrix. Single-writer: update() and
    compact() must not run concurrently with anything else, while flatten()
    and stats() may run concurrently with each other.
    """

    def __init__(self, nrows, ncols, cuts=DEFAULT_CUTS, monoid=None):
        """
        Creates a hierarchy of len(cuts) + 1 empty layers.

        nrows: int
            Number of rows shared by every layer.
        ncols: int
            Number of columns shared by every layer.
        cuts: CutSchedule, iter
            The nonzero thresholds c1 ... c(N-1).
        monoid: monoids.Monoid
            How colliding entries combine; defaults to checked int64 plus.
        """
        self.cuts = cuts if isinstance(cuts, CutSchedule) else CutSchedule(cuts)
        self.monoid = monoid if monoid is not None else monoids.default
        self.layers = [
            hypersparse.HypersparseMatrix(nrows, ncols, self.monoid)
            for _ in range(self.cuts.levels())
        ]
        self.nrows = self.layers[0].nrows
        self.ncols = self.layers[0].ncols
        self._stats = CascadeStats(len(self.layers))

    def levels(self):
        return len(self.layers)

    def update(self, batch):
        """
        Adds a batch of triples to the hierarchy: the batch is built into a
        matrix (combining duplicates), added into A1, and then any layer over
        its cut is cascaded. Out-of-bounds batches are rejected before
        anything changes.

        batch: [hypersparse.EdgeTriple, ], hypersparse.EdgeBatch
            The triples to add.
        """
        batch = hypersparse.as_batch(batch, self.monoid.dtype)
        if not len(batch):
            return
        incoming = hypersparse.HypersparseMatrix.build(
            self.nrows, self.ncols, batch, self.monoid
        )
        self.layers[0].absorb(incoming)
        self._stats.updates_applied += len(batch)
        self.cascade()

    def cascade(self):
        """
        Promotes every layer holding more than its cut into the next layer,
        from the top down, leaving nnz(Ai) <= ci for every i < N. A layer is
        only cleared after its addition into the next one succeeded, so an
        overflow never loses entries.
        """
        for level, cut in enumerate(self.cuts):
            layer = self.layers[level]
            count = layer.nnz()
            if count <= cut:
                continue
            self.layers[level + 1].absorb(layer)
            self._stats.cascades_per_level[level] += 1
            self._stats.entries_promoted_per_level[level] += count
            logger.debug("Cascaded %s entries from layer %s (cut %s) into "
                         "layer %s", count, level + 1, cut, level + 2)

    def flatten(self):
        """
        Returns the sum of all layers as a new matrix, leaving the hierarchy
        unchanged.
        """
        # Start from the largest layer so the biggest dict is copied once
        # rather than merged into
        ordered = sorted(self.layers, key=lambda layer: layer.nnz(),
                         reverse=True)
        result = ordered[0].copy()
        for layer in ordered[1:]:
            result.add_assign(layer)
        return result

    def compact(self):
        """
        Folds every layer into the last one. Useful before long idle periods
        of a long-running ingest; not counted as a cascade.
        """
        last = self.layers[-1]
        for layer in reversed(self.layers[:-1]):
            last.absorb(layer)

    def stats(self):
        """
        Returns a snapshot of the cascade counters.
        """
        return self._stats.snapshot()

    def layer_nnz(self):
        """
        Returns the number of stored entries in each layer, A1 first.
        """
        return [layer.nnz() for layer in self.layers]

    def is_quiescent(self):
        """
        Returns whether every layer with a cut holds no more than its cut.
        """
        return all(layer.nnz() <= cut
                   for layer, cut in zip(self.layers, self.cuts))

    def __repr__(self):
        return "HierarchicalMatrix(nrows={}, ncols={}, cuts={}, nnz={})".format(
            self.nrows, self.ncols, list(self.cuts), self.layer_nnz()
        )
