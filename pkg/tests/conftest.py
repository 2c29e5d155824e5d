# SPDX-License-Identifier: GPL-2.0-only

import os
import sys

import pytest

# The package is a flat directory of modules imported by name, the same way
# hypercascade.py imports its neighbours
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)),
                                "..", "hypercascade"))

import hypersparse  # noqa: E402
import streamgen  # noqa: E402

ETC = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "etc")


@pytest.fixture
def A():
    #     0  1  2  3
    # 0 [ -  2  -  3]
    # 1 [ -  -  8  -]
    # 2 [ 5  -  -  -]
    return hypersparse.HypersparseMatrix.build(3, 4, [
        (0, 1, 2), (0, 3, 3), (1, 2, 8), (2, 0, 5),
    ])


@pytest.fixture
def B():
    #     0  1  2  3
    # 0 [ -  1  -  -]
    # 1 [ -  -  -  4]
    # 2 [ 5  -  -  -]
    return hypersparse.HypersparseMatrix.build(3, 4, [
        (0, 1, 1), (1, 3, 4), (2, 0, 5),
    ])


@pytest.fixture
def small_stream():
    return streamgen.StreamConfig(scale=16, batch_size=1000, num_batches=12,
                                  seed=7)


@pytest.fixture
def etc_dir():
    return ETC
