# SPDX-License-Identifier: GPL-2.0-only

"""
Hypersparse matrices: matrices whose stored-entry count is far smaller than
both their row and column counts.

A HypersparseMatrix stores its entries in a dict keyed by the packed
(row, col) pair, so storage is proportional to the number of stored entries
and never to the dimensions; a 2**64-1 x 2**64-1 matrix costs the same as a
10 x 10 one. When both dimensions fit in 32 bits, (row, col) is packed into
a single 64-bit key (row << 32 | col); otherwise a 128-bit composite key
(row << 64 | col) is used. Either way, packed keys sort in (row, col) order,
so ordering is only imposed when triples are extracted.

Duplicate entries are combined with the matrix's monoid (see monoids.py).
Explicitly stored identity values (e.g. zeros) are kept and counted by nnz().
"""

import collections
import functools
import hashlib
import logging
import operator
import typing

import numpy as np

import monoids
from monoids import INT64_MAX

logger = logging.getLogger("hypercascade." + __name__)

UINT64_MAX = 2**64 - 1
_NARROW_LIMIT = 2**32
_MISSING = object()


class HypersparseError(Exception):
    """
    Base class for errors raised by hypersparse matrix operations.
    """


class DimensionError(HypersparseError, ValueError):
    """
    Raised for invalid matrix dimensions or mismatched operands.
    """


class IndexOutOfBounds(HypersparseError, IndexError):
    """
    Raised when a triple lies outside the matrix it is applied to.
    """

    def __init__(self, message, position=None, triple=None):
        super().__init__(message)
        self.position = position
        self.triple = triple


class ValueOverflow(HypersparseError, OverflowError):
    """
    Raised when combining values leaves the range of the value type.
    """


class EdgeTriple(typing.NamedTuple):
    """
    A single (row, col, value) update.
    """
    row: int
    col: int
    val: typing.Any = 1


class EdgeBatch:
    """
    A columnar batch of triples: parallel numpy arrays of rows, columns and
    values. This is the form streams are generated and ingested in; it
    avoids a Python object per triple.
    """

    __slots__ = ("rows", "cols", "vals")

    def __init__(self, rows, cols, vals):
        """
        rows: array-like
            Row indices; converted to uint64.
        cols: array-like
            Column indices; converted to uint64.
        vals: numpy.ndarray
            Values, one per triple.
        """
        self.rows = _as_index_array(rows, "row")
        self.cols = _as_index_array(cols, "col")
        self.vals = np.asarray(vals)
        if not len(self.rows) == len(self.cols) == len(self.vals):
            raise ValueError("rows, cols and vals differ in length ({}, {}, "
                             "{})".format(len(self.rows), len(self.cols),
                                          len(self.vals)))

    @classmethod
    def empty(cls, dtype=np.int64):
        return cls(np.empty(0, np.uint64), np.empty(0, np.uint64),
                   np.empty(0, dtype))

    @classmethod
    def from_triples(cls, triples, dtype=np.int64):
        """
        Builds a batch from a sequence of EdgeTriple (or (row, col, val)
        tuples). Raises IndexOutOfBounds for negative or >64-bit indices and
        ValueOverflow for values that don't fit the dtype.

        triples: iter
            The triples to convert.
        dtype: numpy.dtype
            The value type of the batch.
        """
        triples = list(triples)
        if not triples:
            return cls.empty(dtype)

        rows, cols, vals = (list(column) for column in zip(*triples))
        for name, column in (("row", rows), ("col", cols)):
            lowest, highest = min(column), max(column)
            if lowest < 0 or highest > UINT64_MAX:
                bad = lowest if lowest < 0 else highest
                position = column.index(bad)
                raise IndexOutOfBounds(
                    "triple {} {} has {} index {} outside the unsigned "
                    "64-bit range".format(position, tuple(triples[position]),
                                          name, bad),
                    position=position,
                    triple=EdgeTriple(*triples[position])
                )
        try:
            value_array = np.array(vals, dtype=dtype)
        except OverflowError:
            dtype_info = np.iinfo(dtype)
            position = next(i for i, v in enumerate(vals)
                            if not dtype_info.min <= v <= dtype_info.max)
            raise ValueOverflow("triple {} {} has a value that does not fit "
                                "in {}".format(position,
                                               tuple(triples[position]),
                                               np.dtype(dtype).name)) from None
        return cls(np.array(rows, dtype=np.uint64),
                   np.array(cols, dtype=np.uint64),
                   value_array)

    @classmethod
    def concat(cls, batches):
        """
        Concatenates batches (in order) into a single batch.
        """
        batches = list(batches)
        if not batches:
            return cls.empty()
        return cls(np.concatenate([b.rows for b in batches]),
                   np.concatenate([b.cols for b in batches]),
                   np.concatenate([b.vals for b in batches]))

    def triples(self):
        """
        Yields each triple in the batch as an EdgeTriple of Python scalars.
        """
        for row, col, val in zip(self.rows.tolist(), self.cols.tolist(),
                                 self.vals.tolist()):
            yield EdgeTriple(row, col, val)

    def __iter__(self):
        return self.triples()

    def __len__(self):
        return len(self.rows)

    def __repr__(self):
        return "EdgeBatch(len={}, dtype={})".format(len(self),
                                                    self.vals.dtype)


def _as_index_array(values, name):
    """
    Converts index values to a uint64 array, refusing negative signed input
    (which astype would silently wrap).
    """
    array = np.asarray(values)
    if array.dtype == np.uint64:
        return array
    if array.size and array.dtype.kind in "iu" and array.min() < 0:
        raise IndexOutOfBounds("negative {} index {}".format(
            name, int(array.min())
        ))
    if array.size and array.dtype.kind not in "iu":
        raise TypeError("{} indices must be integers, not {}".format(
            name, array.dtype
        ))
    return array.astype(np.uint64)


def as_batch(triples, dtype=np.int64):
    """
    Returns triples as an EdgeBatch, converting a sequence of EdgeTriple if
    needed.
    """
    if isinstance(triples, EdgeBatch):
        return triples
    return EdgeBatch.from_triples(triples, dtype=dtype)


def check_dimension(value, name):
    """
    Validates a matrix dimension and returns it as an int. Dimensions must be
    in [1, 2**64 - 1]; 2**64 itself doesn't fit a 64-bit count, so
    2**64 - 1 stands in for "the whole unsigned 64-bit index space".
    """
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise DimensionError("{} must be an integer, not {!r}".format(
            name, value
        ))
    value = int(value)
    if value < 1:
        raise DimensionError("{} = {} must be at least 1".format(name, value))
    if value > UINT64_MAX:
        raise DimensionError("{} = {} exceeds the 64-bit index space; use "
                             "2**64 - 1".format(name, value))
    return value


def _max_abs(values):
    """
    Returns the largest absolute value in an int64 array as a Python int.
    """
    if not values.size:
        return 0
    return max(-int(values.min()), int(values.max()))


def _segment_reduce(monoid, vals, starts):
    """
    Folds each run vals[starts[i]:starts[i+1]] with the monoid. Checked
    monoids are folded with exact Python integers whenever the int64 fold
    could possibly wrap.
    """
    if monoid.checked:
        run_lengths = np.diff(np.append(starts, len(vals)))
        if _max_abs(vals) * int(run_lengths.max()) > INT64_MAX:
            exact = monoid.ufunc.reduceat(vals.astype(object), starts)
            for i, total in enumerate(exact):
                if not monoid.in_range(total):
                    raise ValueOverflow("{} overflow folding {} values into "
                                        "{}".format(monoid.name,
                                                    int(run_lengths[i]),
                                                    total))
            return exact.astype(monoid.dtype)
    return monoid.ufunc.reduceat(vals, starts)


def reduce_by_key(keys, vals, monoid):
    """
    Combines values that share a key. Returns the sorted unique keys and the
    folded values as numpy arrays.

    keys: numpy.ndarray
        uint64 keys.
    vals: numpy.ndarray
        Values in the monoid's dtype, parallel to keys.
    monoid: monoids.Monoid
        The monoid used to combine duplicates.
    """
    if not len(keys):
        return keys, vals
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    vals = vals[order]
    is_start = np.empty(len(keys), dtype=bool)
    is_start[0] = True
    np.not_equal(keys[1:], keys[:-1], out=is_start[1:])
    starts = np.flatnonzero(is_start)
    if len(starts) == len(keys):
        return keys, vals
    return keys[starts], _segment_reduce(monoid, vals, starts)


def _fold_pairs(pairs, monoid):
    """
    Folds (key, value) pairs into a dict with the monoid; the pure-Python
    path used for 128-bit keys.
    """
    folded = {}
    combine = monoid.combine
    for key, value in pairs:
        if key in folded:
            try:
                folded[key] = combine(folded[key], value)
            except OverflowError as err:
                raise ValueOverflow(str(err)) from None
        else:
            folded[key] = value
    return folded


class HypersparseMatrix:
    """
    A single hypersparse matrix layer. Not thread-safe for concurrent
    mutation; a matrix may be read from several threads while no thread
    writes to it.
    """

    def __init__(self, nrows, ncols, monoid=None):
        """
        Creates an empty nrows x ncols matrix.

        nrows: int
            Number of rows, 1 <= nrows <= 2**64 - 1.
        ncols: int
            Number of columns, 1 <= ncols <= 2**64 - 1.
        monoid: monoids.Monoid
            How colliding entries combine; defaults to checked int64 plus.
        """
        self.nrows = check_dimension(nrows, "nrows")
        self.ncols = check_dimension(ncols, "ncols")
        self.monoid = monoid if monoid is not None else monoids.default
        narrow = self.nrows <= _NARROW_LIMIT and self.ncols <= _NARROW_LIMIT
        self._shift = 32 if narrow else 64
        self._mask = (1 << self._shift) - 1
        self._entries = {}
        # Upper bound on |value| over stored entries; lets checked addition
        # skip per-entry range tests while no sum can reach 2**63
        self._bound = 0

    @classmethod
    def build(cls, nrows, ncols, triples, monoid=None):
        """
        Builds a matrix from triples, combining duplicate (row, col) keys
        with the monoid. Raises IndexOutOfBounds for triples outside the
        matrix and ValueOverflow if a combined value doesn't fit.

        triples: [EdgeTriple, ], EdgeBatch
            The entries to store.
        """
        matrix = cls(nrows, ncols, monoid)
        entries, bound = matrix._fold_batch(as_batch(triples,
                                                     matrix.monoid.dtype))
        matrix._entries = entries
        matrix._bound = bound
        return matrix

    def narrow(self):
        """
        Returns whether keys are packed into a single 64-bit word.
        """
        return self._shift == 32

    def check_bounds(self, batch):
        """
        Raises IndexOutOfBounds naming the first triple of the batch that
        lies outside this matrix.
        """
        if not len(batch):
            return
        if (int(batch.rows.max()) < self.nrows
                and int(batch.cols.max()) < self.ncols):
            return
        outside = (batch.rows >= self.nrows) | (batch.cols >= self.ncols)
        position = int(np.flatnonzero(outside)[0])
        triple = EdgeTriple(int(batch.rows[position]),
                            int(batch.cols[position]),
                            batch.vals[position].item())
        raise IndexOutOfBounds(
            "triple {} {} is outside the {} x {} matrix".format(
                position, tuple(triple), self.nrows, self.ncols
            ),
            position=position,
            triple=triple
        )

    def _fold_batch(self, batch):
        """
        Validates and folds a batch into a fresh entries dict. Returns the
        dict and its |value| bound.
        """
        self.check_bounds(batch)
        monoid = self.monoid
        vals = batch.vals.astype(monoid.dtype, copy=False)
        if not len(batch):
            return {}, 0

        if self.narrow():
            keys = (batch.rows << np.uint64(32)) | batch.cols
            keys, vals = reduce_by_key(keys, vals, monoid)
            bound = _max_abs(vals) if monoid.checked else 0
            return dict(zip(keys.tolist(), vals.tolist())), bound

        pairs = (((row << 64) | col, val)
                 for row, col, val in zip(batch.rows.tolist(),
                                          batch.cols.tolist(),
                                          vals.tolist()))
        entries = _fold_pairs(pairs, monoid)
        bound = 0
        if monoid.checked and entries:
            bound = max(abs(v) for v in entries.values())
        return entries, bound

    def _unpack(self, key):
        return key >> self._shift, key & self._mask

    def _check_same_dims(self, other):
        if not isinstance(other, HypersparseMatrix):
            raise TypeError("expected a HypersparseMatrix, got {}".format(
                type(other).__name__
            ))
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionError(
                "dimension mismatch: {} x {} vs {} x {}".format(
                    self.nrows, self.ncols, other.nrows, other.ncols
                )
            )

    def nnz(self):
        """
        Returns the number of stored entries (explicit zeros included).
        """
        return len(self._entries)

    def clear(self):
        """
        Removes every entry, keeping the dimensions. The entry dict is
        dropped rather than emptied in place so a large layer's table is
        released immediately.
        """
        self._entries = {}
        self._bound = 0

    def copy(self):
        """
        Returns an independent copy of the matrix.
        """
        duplicate = type(self)(self.nrows, self.ncols, self.monoid)
        duplicate._entries = self._entries.copy()
        duplicate._bound = self._bound
        return duplicate

    def get(self, row, col, default=None):
        """
        Returns the value stored at (row, col), or default.
        """
        if not (0 <= row < self.nrows and 0 <= col < self.ncols):
            raise IndexOutOfBounds("({}, {}) is outside the {} x {} "
                                   "matrix".format(row, col, self.nrows,
                                                   self.ncols))
        return self._entries.get((row << self._shift) | col, default)

    def add_assign(self, other, monoid=None):
        """
        Adds other into this matrix in place (self = self + other). Keys in
        both combine with the monoid; other is left untouched. The addition
        is all-or-nothing: an overflow raises before self changes.

        other: HypersparseMatrix
            A matrix with identical dimensions.
        monoid: monoids.Monoid
            Overrides the matrix's own monoid.
        """
        self._check_same_dims(other)
        if not other._entries:
            return
        if not self._entries:
            self._entries = other._entries.copy()
            self._bound = other._bound
            return
        self._merge(other._entries, other._bound, monoid or self.monoid)

    def absorb(self, other, monoid=None):
        """
        Adds other into this matrix and clears other. When this matrix is
        empty, other's storage is moved over without copying.
        """
        self._check_same_dims(other)
        if not self._entries:
            self._entries, other._entries = other._entries, {}
            self._bound, other._bound = other._bound, 0
            return
        self.add_assign(other, monoid)
        other.clear()

    def _merge(self, entries, bound, monoid):
        mine = self._entries
        op = monoid.op
        # Only colliding keys need the monoid; dict.update handles the rest
        sums = {key: op(mine[key], entries[key])
                for key in mine.keys() & entries.keys()}
        new_bound = self._bound + bound
        if monoid.checked and new_bound > INT64_MAX:
            new_bound = max(self._bound, bound)
            for key, total in sums.items():
                if not monoid.in_range(total):
                    row, col = self._unpack(key)
                    raise ValueOverflow(
                        "{} overflow at ({}, {}): {} + {} does not fit in "
                        "int64".format(monoid.name, row, col, mine[key],
                                       entries[key])
                    )
                new_bound = max(new_bound, abs(total))
        self._bound = new_bound
        mine.update(entries)
        mine.update(sums)

    def to_batch(self):
        """
        Returns the stored entries as an EdgeBatch sorted by (row, col).
        """
        count = len(self._entries)
        if not count:
            return EdgeBatch.empty(self.monoid.dtype)
        if self.narrow():
            keys = np.fromiter(self._entries.keys(), dtype=np.uint64,
                               count=count)
            vals = np.fromiter(self._entries.values(),
                               dtype=self.monoid.dtype, count=count)
            order = np.argsort(keys)
            keys = keys[order]
            return EdgeBatch(keys >> np.uint64(32),
                             keys & np.uint64(self._mask),
                             vals[order])
        items = sorted(self._entries.items())
        return EdgeBatch(
            np.array([key >> 64 for key, _ in items], dtype=np.uint64),
            np.array([key & self._mask for key, _ in items], dtype=np.uint64),
            np.array([value for _, value in items], dtype=self.monoid.dtype)
        )

    def extract_triples(self):
        """
        Returns every stored entry as a list of EdgeTriple in strictly
        increasing (row, col) order.
        """
        return list(self.to_batch().triples())

    def equals(self, other):
        """
        Returns whether other has the same dimensions and exactly the same
        stored entries (keys and values).
        """
        if not isinstance(other, HypersparseMatrix):
            return False
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        return self._entries == other._entries

    def first_difference(self, other):
        """
        Returns (row, col, self_value, other_value) for the smallest key on
        which the two matrices disagree, or None if they hold the same
        entries. A missing entry is reported as None.
        """
        self._check_same_dims(other)
        mine, theirs = self._entries, other._entries
        differing = [
            key for key in mine.keys() | theirs.keys()
            if mine.get(key, _MISSING) != theirs.get(key, _MISSING)
        ]
        if not differing:
            return None
        key = min(differing)
        row, col = self._unpack(key)
        return row, col, mine.get(key), theirs.get(key)

    def _axis_indices(self, axis):
        """
        Returns the row (axis 0) or column (axis 1) index of every stored
        entry as a uint64 array, in dict order.
        """
        keys = np.fromiter(self._entries.keys(), dtype=np.uint64,
                           count=len(self._entries))
        if axis == 0:
            return keys >> np.uint64(32)
        return keys & np.uint64(self._mask)

    def _axis_sums(self, axis):
        if not self._entries:
            return {}
        if self.narrow():
            indices = self._axis_indices(axis)
            vals = np.fromiter(self._entries.values(), dtype=self.monoid.dtype,
                               count=len(self._entries))
            indices, vals = reduce_by_key(indices, vals, self.monoid)
            return dict(zip(indices.tolist(), vals.tolist()))
        pairs = ((self._unpack(key)[axis], value)
                 for key, value in self._entries.items())
        return _fold_pairs(pairs, self.monoid)

    def row_sums(self):
        """
        Returns {row: monoid fold of the row's values} for every row with at
        least one stored entry.
        """
        return self._axis_sums(0)

    def col_sums(self):
        """
        Returns {col: monoid fold of the column's values} for every column
        with at least one stored entry.
        """
        return self._axis_sums(1)

    def _axis_degrees(self, axis):
        if not self._entries:
            return {}
        if self.narrow():
            indices, counts = np.unique(self._axis_indices(axis),
                                        return_counts=True)
            return dict(zip(indices.tolist(), counts.tolist()))
        return dict(collections.Counter(self._unpack(key)[axis]
                                        for key in self._entries))

    def row_degrees(self):
        """
        Returns {row: number of stored entries in the row}.
        """
        return self._axis_degrees(0)

    def col_degrees(self):
        """
        Returns {col: number of stored entries in the column}.
        """
        return self._axis_degrees(1)

    def value_sum(self):
        """
        Returns the monoid fold of every stored value.
        """
        monoid = self.monoid
        values = self._entries.values()
        if monoid.op is operator.add:
            total = sum(values, monoid.identity)
        else:
            total = functools.reduce(monoid.op, values, monoid.identity)
        if not monoid.in_range(total):
            raise ValueOverflow("{} overflow: the sum of all values ({}) does "
                                "not fit in int64".format(monoid.name, total))
        return total

    def max_value(self):
        """
        Returns the largest stored value, or None for an empty matrix.
        """
        return max(self._entries.values(), default=None)

    def digest(self):
        """
        Returns a hex blake2b digest of the dimensions and sorted entries;
        equal matrices have equal digests.
        """
        batch = self.to_batch()
        hasher = hashlib.blake2b(digest_size=16)
        hasher.update("{}x{}:{}".format(self.nrows, self.ncols,
                                        self.monoid.dtype.name).encode())
        for array in (batch.rows, batch.cols, batch.vals):
            hasher.update(np.ascontiguousarray(array).tobytes())
        return hasher.hexdigest()

    def __add__(self, other):
        return ewise_add(self, other)

    def __iadd__(self, other):
        self.add_assign(other)
        return self

    def __repr__(self):
        return "HypersparseMatrix(nrows={}, ncols={}, nnz={}, monoid={})".format(
            self.nrows, self.ncols, self.nnz(), self.monoid.name
        )


def ewise_add(left, right, monoid=None):
    """
    Returns the element-wise union sum of two matrices with identical
    dimensions. Keys in both carry monoid(a, b); keys in one carry that
    value unchanged. Neither input is modified.
    """
    left._check_same_dims(right)
    result = left.copy()
    if monoid is not None:
        result.monoid = monoid
    result.add_assign(right, monoid)
    return result
