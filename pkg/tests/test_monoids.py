import pickle

import numpy as np
import pytest

import monoids
from hypersparse import EdgeBatch, HypersparseMatrix, ewise_add

DIMS = (2**32, 2**32)


def random_matrix(rng, monoid, n=None):
    # A narrow index range so that keys collide often
    n = int(rng.integers(0, 60)) if n is None else n
    batch = EdgeBatch(rng.integers(0, 8, n), rng.integers(0, 8, n),
                      rng.integers(-1000, 1000, n))
    return HypersparseMatrix.build(*DIMS, batch, monoid)


int_monoids = [monoids.plus_int64, monoids.max_int64]


@pytest.mark.parametrize("monoid", int_monoids, ids=lambda m: m.name)
@pytest.mark.parametrize("seed", range(125))
def test_ewise_add_commutative(seed, monoid):
    rng = np.random.default_rng(seed)
    A, B = random_matrix(rng, monoid), random_matrix(rng, monoid)
    assert ewise_add(A, B).equals(ewise_add(B, A))


@pytest.mark.parametrize("monoid", int_monoids, ids=lambda m: m.name)
@pytest.mark.parametrize("seed", range(125))
def test_ewise_add_associative(seed, monoid):
    rng = np.random.default_rng(10**6 + seed)
    A, B, C = (random_matrix(rng, monoid) for _ in range(3))
    assert ewise_add(ewise_add(A, B), C).equals(ewise_add(A, ewise_add(B, C)))


@pytest.mark.parametrize("monoid", int_monoids, ids=lambda m: m.name)
@pytest.mark.parametrize("seed", range(125))
def test_ewise_add_identity(seed, monoid):
    rng = np.random.default_rng(2 * 10**6 + seed)
    A = random_matrix(rng, monoid)
    empty = HypersparseMatrix(*DIMS, monoid)
    assert ewise_add(A, empty).equals(A)
    assert ewise_add(empty, A).equals(A)


@pytest.mark.parametrize("monoid", int_monoids, ids=lambda m: m.name)
@pytest.mark.parametrize("seed", range(125))
def test_build_matches_permuted_singleton_fold(seed, monoid):
    rng = np.random.default_rng(3 * 10**6 + seed)
    n = int(rng.integers(1, 60))
    batch = EdgeBatch(rng.integers(0, 8, n), rng.integers(0, 8, n),
                      rng.integers(-1000, 1000, n))
    built = HypersparseMatrix.build(*DIMS, batch, monoid)

    triples = list(batch.triples())
    folded = HypersparseMatrix(*DIMS, monoid)
    for i in rng.permutation(n):
        folded = ewise_add(folded,
                           HypersparseMatrix.build(*DIMS, [triples[i]], monoid))
    assert folded.equals(built)


@pytest.mark.parametrize("monoid", [monoids.plus_int64, monoids.plus_fp64,
                                    monoids.max_int64], ids=lambda m: m.name)
def test_scalar_identity(monoid):
    for value in (0, 1, -7, 123456789):
        assert monoid.combine(value, monoid.identity) == value
        assert monoid.combine(monoid.identity, value) == value


def test_checked_combine_overflows():
    with pytest.raises(OverflowError):
        monoids.plus_int64.combine(monoids.INT64_MAX, 1)
    with pytest.raises(OverflowError):
        monoids.plus_int64.combine(monoids.INT64_MIN, -1)
    assert monoids.max_int64.combine(monoids.INT64_MAX, 1) == monoids.INT64_MAX


def test_pickled_by_name():
    for monoid in (monoids.plus_int64, monoids.plus_fp64, monoids.max_int64):
        assert pickle.loads(pickle.dumps(monoid)) is monoid


def test_for_value_type():
    assert monoids.for_value_type("int64") is monoids.plus_int64
    assert monoids.for_value_type("float64") is monoids.plus_fp64
    with pytest.raises(ValueError):
        monoids.for_value_type("int32")
