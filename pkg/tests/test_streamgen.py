import numpy as np
import pytest

import streamgen
from hypersparse import EdgeBatch, EdgeTriple
from streamgen import StreamConfig, StreamConfigError


def test_default_workload_size():
    cfg = StreamConfig()
    assert cfg.batch_size == 100000
    assert cfg.num_batches == 1000
    assert cfg.total_triples() == 100000000
    assert cfg.dimension() == 2**32


@pytest.mark.parametrize("changes", [
    {"scale": 0},
    {"scale": 64},
    {"skew": (0.5, 0.5, 0.1, 0.1)},
    {"skew": (0.1, 0.3, 0.3, 0.3)},
    {"skew": (0.5, 0.5)},
    {"batch_size": 0},
    {"num_batches": 0},
    {"seed": -1},
    {"value_mode": "zeros"},
])
def test_invalid_config(changes):
    with pytest.raises(StreamConfigError):
        StreamConfig(**changes)


def test_mix64_vector():
    # splitmix64 finalizer of 0 is 0; of GOLDEN is the first splitmix64
    # output for seed 0
    assert int(streamgen.mix64(np.array([0], dtype=np.uint64))[0]) == 0
    assert int(streamgen.mix64(np.array([streamgen.GOLDEN],
                                        dtype=np.uint64))[0]) == \
        0xE220A8397B1DCDAF


def test_batch_is_deterministic(small_stream):
    first = streamgen.generate_batch(small_stream, 3)
    second = streamgen.generate_batch(small_stream, 3)
    for name in ("rows", "cols", "vals"):
        assert np.array_equal(getattr(first, name), getattr(second, name))


def test_batch_is_independent_of_order(small_stream):
    forward = list(streamgen.iter_batches(small_stream))
    backward = list(streamgen.iter_batches(
        small_stream, reversed(range(small_stream.num_batches))
    ))[::-1]
    for a, b in zip(forward, backward):
        assert np.array_equal(a.rows, b.rows)
        assert np.array_equal(a.cols, b.cols)


def test_batches_differ(small_stream):
    a = streamgen.generate_batch(small_stream, 0)
    b = streamgen.generate_batch(small_stream, 1)
    assert not np.array_equal(a.rows, b.rows)
    other_seed = streamgen.generate_batch(small_stream.replace(seed=8), 0)
    assert not np.array_equal(a.rows, other_seed.rows)


def test_batch_index_range(small_stream):
    with pytest.raises(StreamConfigError):
        streamgen.generate_batch(small_stream, small_stream.num_batches)


def test_endpoints_in_range():
    cfg = StreamConfig(scale=20, batch_size=100000, num_batches=10)
    for batch in streamgen.iter_batches(cfg):
        assert len(batch) == 100000
        assert int(batch.rows.max()) < 2**20
        assert int(batch.cols.max()) < 2**20


def test_odd_scale_uses_every_bit():
    cfg = StreamConfig(scale=3, skew=streamgen.UNIFORM_SKEW, batch_size=5000,
                       num_batches=1)
    batch = streamgen.generate_batch(cfg, 0)
    assert set(batch.rows.tolist()) == set(range(8))
    assert set(batch.cols.tolist()) == set(range(8))


def test_full_scale_endpoints():
    cfg = StreamConfig(scale=63, batch_size=1000, num_batches=1)
    batch = streamgen.generate_batch(cfg, 0)
    assert int(batch.rows.max()) < 2**63
    assert int(batch.cols.max()) < 2**63


def test_values():
    ones = streamgen.generate_batch(StreamConfig(scale=10, batch_size=1000,
                                                 num_batches=1), 0)
    assert ones.vals.tolist() == [1] * 1000
    random = streamgen.generate_batch(StreamConfig(
        scale=10, batch_size=10000, num_batches=1, value_mode="random"
    ), 0)
    assert random.vals.dtype == np.int64
    assert int(random.vals.min()) >= 1
    assert int(random.vals.max()) <= streamgen.RANDOM_VALUE_MAX
    assert len(set(random.vals.tolist())) > 1000


def test_value_mode_keeps_endpoints():
    cfg = StreamConfig(scale=10, batch_size=1000, num_batches=1)
    ones = streamgen.generate_batch(cfg, 0)
    random = streamgen.generate_batch(cfg.replace(value_mode="random"), 0)
    assert np.array_equal(ones.rows, random.rows)
    assert np.array_equal(ones.cols, random.cols)


def test_gen_then_count(tmp_path):
    cfg = StreamConfig(scale=32, batch_size=100000, num_batches=10, seed=11)
    first, second = tmp_path / "first.tsv", tmp_path / "second.tsv"
    assert streamgen.dump_stream(cfg, first) == 1000000
    assert streamgen.dump_stream(cfg, second) == 1000000
    with open(first) as edges:
        assert sum(1 for _ in edges) == 1000000
    assert first.read_bytes() == second.read_bytes()


def test_degree_histogram():
    assert streamgen.degree_histogram([EdgeTriple(1, 2, 1)]) == {1: 1}
    assert streamgen.degree_histogram([(1, 2, 1), (1, 3, 1)]) == {2: 1}
    assert streamgen.degree_histogram([(1, 2, 1), (1, 2, 1), (4, 0, 1)]) == \
        {2: 1, 1: 1}
    assert streamgen.degree_histogram([]) == {}


def million_edges(skew):
    cfg = StreamConfig(scale=18, skew=skew, batch_size=100000,
                       num_batches=10, seed=1)
    return streamgen.degree_histogram(
        EdgeBatch.concat(streamgen.iter_batches(cfg))
    )


def test_power_law_skew():
    histogram = million_edges(streamgen.DEFAULT_SKEW)
    highest, mean = streamgen.histogram_summary(histogram)
    assert highest >= 50 * mean
    assert streamgen.tail_slope(histogram) < -1


def test_uniform_skew():
    histogram = million_edges(streamgen.UNIFORM_SKEW)
    highest, mean = streamgen.histogram_summary(histogram)
    assert highest < 10 * mean


def test_histogram_of_batches_matches():
    cfg = StreamConfig(scale=12, batch_size=5000, num_batches=2, seed=5)
    combined = EdgeBatch.concat(streamgen.iter_batches(cfg))
    histogram = streamgen.degree_histogram(combined)
    assert sum(d * c for d, c in histogram.items()) == 10000


def test_tail_slope_needs_two_bins():
    assert np.isnan(streamgen.tail_slope({1: 10}))
    assert np.isnan(streamgen.tail_slope({}))
