import pytest

import analytics
from hypersparse import HypersparseMatrix


def test_network_stats(A):
    stats = analytics.network_stats(A)
    assert stats.valid_packets == 18
    assert stats.unique_links == 4
    assert stats.unique_sources == 3
    assert stats.unique_destinations == 4
    assert stats.max_link_packets == 8
    assert stats.max_source_packets == 8
    assert stats.max_source_fan_out == 2
    assert stats.max_destination_packets == 8
    assert stats.max_destination_fan_in == 1


def test_network_stats_fan_in():
    C = HypersparseMatrix.build(10, 10, [(1, 0, 1), (2, 0, 1), (3, 0, 4),
                                         (3, 5, 1)])
    stats = analytics.network_stats(C)
    assert stats.max_destination_fan_in == 3
    assert stats.max_destination_packets == 6
    assert stats.max_source_packets == 5


def test_network_stats_empty():
    stats = analytics.network_stats(HypersparseMatrix(10, 10))
    assert set(stats.as_dict().values()) == {0}


def test_top_k():
    assert analytics.top_k({4: 7, 1: 8, 9: 7}, 2) == [(1, 8), (4, 7)]
    assert analytics.top_k({4: 7, 1: 8, 9: 7}, 10) == [(1, 8), (4, 7), (9, 7)]
    assert analytics.top_k({}, 3) == []
    assert analytics.top_k({1: 1}, 0) == []


def test_network_stats_record():
    stats = analytics.NetworkStats(unique_links=4)
    assert stats.unique_links == 4
    assert stats.valid_packets == 0
    assert list(stats.as_dict()) == list(analytics.FIELDS)
    with pytest.raises(TypeError):
        analytics.NetworkStats(unique_hosts=1)
