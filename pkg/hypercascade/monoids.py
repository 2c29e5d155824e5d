# SPDX-License-Identifier: GPL-2.0-only

"""
Additive monoids used to merge colliding matrix entries.

A monoid is an associative, commutative binary operation with an identity
element. Every monoid here has a scalar form (used when merging dictionaries
of entries) and a numpy ufunc form (used when folding whole batches of
values at once). The default monoid is checked 64-bit integer addition:
results that leave the int64 range raise instead of wrapping around.
"""

import operator
import types

import numpy as np

INT64_MIN = -2**63
INT64_MAX = 2**63 - 1


class Monoid(types.SimpleNamespace):
    """
    A commutative monoid over matrix values.
    """

    def __init__(self, name, op, identity, ufunc, dtype, checked=False):
        """
        name: str
            A short name used in reports and errors.
        op: func
            The scalar binary operation.
        identity: object
            The identity element; op(v, identity) == v.
        ufunc: numpy.ufunc
            The vectorized form of op; must support reduceat.
        dtype: numpy.dtype
            The value type stored in matrices using this monoid.
        checked: bool
            Whether results must be checked against the int64 range.
        """
        self.name = name
        self.op = op
        self.identity = identity
        self.ufunc = ufunc
        self.dtype = np.dtype(dtype)
        self.checked = checked

    def combine(self, left, right):
        """
        Returns op(left, right), raising OverflowError on a checked monoid if
        the result doesn't fit.
        """
        result = self.op(left, right)
        if self.checked and not INT64_MIN <= result <= INT64_MAX:
            raise OverflowError(
                "{} overflow: {} + {} does not fit in int64".format(
                    self.name, left, right
                )
            )
        return result

    def in_range(self, value):
        """
        Returns whether the value is representable by this monoid.
        """
        if not self.checked:
            return True
        return INT64_MIN <= value <= INT64_MAX

    def __repr__(self):
        return "Monoid({})".format(self.name)

    def __reduce__(self):
        # Monoids are singletons; pickle them by name so worker processes
        # receive the same objects
        return (lookup, (self.name,))


plus_int64 = Monoid("plus_int64", operator.add, 0, np.add, np.int64,
                    checked=True)
plus_fp64 = Monoid("plus_fp64", operator.add, 0.0, np.add, np.float64)
max_int64 = Monoid("max_int64", max, INT64_MIN, np.maximum, np.int64)

default = plus_int64

_by_name = {m.name: m for m in (plus_int64, plus_fp64, max_int64)}
_by_value_type = {"int64": plus_int64, "float64": plus_fp64}


def lookup(name):
    """
    Returns the monoid with the given name. Raises KeyError if unknown.
    """
    return _by_name[name]


def for_value_type(value_type):
    """
    Returns the additive monoid matching a configured value type
    ("int64" or "float64").
    """
    try:
        return _by_value_type[value_type]
    except KeyError:
        raise ValueError("unknown value type {!r}; expected one of {}".format(
            value_type, ", ".join(_by_value_type)
        )) from None
