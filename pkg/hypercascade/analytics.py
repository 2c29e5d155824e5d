# SPDX-License-Identifier: GPL-2.0-only

"""
Traffic-matrix statistics. Rows are sources, columns are destinations and a
value counts the packets (or updates) seen on that link.
"""

import types

FIELDS = (
    "valid_packets",
    "unique_links",
    "unique_sources",
    "unique_destinations",
    "max_link_packets",
    "max_source_packets",
    "max_source_fan_out",
    "max_destination_packets",
    "max_destination_fan_in",
)


class NetworkStats(types.SimpleNamespace):
    """
    Packet and link counts of a traffic matrix; unset counts are zero.
    """

    def __init__(self, **counts):
        unknown = set(counts) - set(FIELDS)
        if unknown:
            raise TypeError("unknown network statistics: {}".format(
                ", ".join(sorted(unknown))
            ))
        super().__init__(**dict(dict.fromkeys(FIELDS, 0), **counts))

    def as_dict(self):
        return {name: getattr(self, name) for name in FIELDS}


def network_stats(matrix):
    """
    Returns the NetworkStats of a HypersparseMatrix. Every field is zero for
    an empty matrix.
    """
    if not matrix.nnz():
        return NetworkStats()
    row_sums = matrix.row_sums()
    col_sums = matrix.col_sums()
    return NetworkStats(
        valid_packets=matrix.value_sum(),
        unique_links=matrix.nnz(),
        unique_sources=len(row_sums),
        unique_destinations=len(col_sums),
        max_link_packets=matrix.max_value(),
        max_source_packets=max(row_sums.values()),
        max_source_fan_out=max(matrix.row_degrees().values()),
        max_destination_packets=max(col_sums.values()),
        max_destination_fan_in=max(matrix.col_degrees().values()),
    )


def top_k(mapping, k):
    """
    Returns the k (index, value) pairs with the largest values, largest
    first; ties go to the smaller index.

    >>> top_k({4: 7, 1: 8, 9: 7}, 2)
    [(1, 8), (4, 7)]
    """
    return sorted(mapping.items(), key=lambda item: (-item[1], item[0]))[:k]
