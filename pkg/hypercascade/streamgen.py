# SPDX-License-Identifier: GPL-2.0-only

"""
A deterministic, seeded power-law edge stream.

Edges come from R-MAT: every endpoint bit is chosen by dropping the edge into
one of four quadrants of the (sub)matrix with probabilities (a, b, c, d),
a = top-left, b = top-right, c = bottom-left, d = bottom-right, one level per
bit from the most significant bit down. With a > b, c > d this piles edges
onto a few rows and columns and produces a heavy-tailed degree distribution;
with a = b = c = d = 0.25 the endpoints are uniform.

Randomness is counter based, so each batch is a pure function of
(seed, batch_index) and batches can be generated in any order, or in
parallel, with identical results. The mixing function is the splitmix64
finalizer:

    mix(z) = z ^ (z >> 30); z *= 0xBF58476D1CE4E5B9
             z ^= (z >> 27);  z *= 0x94D049BB133111EB
             z ^= (z >> 31)                        (all arithmetic mod 2**64)

    batch key  = mix(seed ^ mix(batch_index + GOLDEN))
    draw j     = mix(key + (j + 1) * GOLDEN)       GOLDEN = 0x9E3779B97F4A7C15

A batch of n triples at scale s uses n * ceil(s / 2) draws for endpoints
(each 64-bit draw supplies two 32-bit uniforms, one per level) followed by n
draws for values when value_mode is "random".
"""

import dataclasses
import logging
import math

import numpy as np

import edgelist
import hypersparse

logger = logging.getLogger("hypercascade." + __name__)

GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = 2**64 - 1
_TWO_POW_32 = float(2**32)

DEFAULT_SKEW = (0.57, 0.19, 0.19, 0.05)
UNIFORM_SKEW = (0.25, 0.25, 0.25, 0.25)
VALUE_MODES = ("ones", "random")
RANDOM_VALUE_MAX = 1024


class StreamConfigError(ValueError):
    """
    Raised for an invalid stream configuration.
    """


@dataclasses.dataclass(frozen=True)
class StreamConfig:
    """
    Parameters of a power-law stream. The defaults describe 100,000,000
    updates in 1,000 batches of 100,000 over a 2**32 x 2**32 (IPv4-shaped)
    matrix.
    """
    scale: int = 32
    skew: tuple = DEFAULT_SKEW
    batch_size: int = 100000
    num_batches: int = 1000
    seed: int = 1
    value_mode: str = "ones"

    def __post_init__(self):
        object.__setattr__(self, "skew", tuple(float(p) for p in self.skew))
        self.validate()

    def validate(self):
        """
        Raises StreamConfigError if the configuration is unusable.
        """
        if not 1 <= self.scale <= 63:
            raise StreamConfigError("scale = {} must be in [1, 63]".format(
                self.scale
            ))
        if len(self.skew) != 4:
            raise StreamConfigError("skew needs 4 probabilities (a, b, c, d), "
                                    "got {}".format(len(self.skew)))
        a, b, c, d = self.skew
        if any(p < 0 for p in self.skew):
            raise StreamConfigError("skew {} has a negative probability".format(
                self.skew
            ))
        if abs(a + b + c + d - 1.0) > 1e-9:
            raise StreamConfigError("skew {} sums to {}, not 1".format(
                self.skew, a + b + c + d
            ))
        if a < max(b, c, d):
            raise StreamConfigError("skew {} is not power-law shaped; a must "
                                    "be the largest probability".format(
                                        self.skew
                                    ))
        if self.batch_size < 1:
            raise StreamConfigError("batch_size = {} must be at least "
                                    "1".format(self.batch_size))
        if self.num_batches < 1:
            raise StreamConfigError("num_batches = {} must be at least "
                                    "1".format(self.num_batches))
        if not 0 <= self.seed <= _MASK64:
            raise StreamConfigError("seed = {} must be an unsigned 64-bit "
                                    "integer".format(self.seed))
        if self.value_mode not in VALUE_MODES:
            raise StreamConfigError("value_mode = {!r} must be one of "
                                    "{}".format(self.value_mode,
                                                ", ".join(VALUE_MODES)))

    def dimension(self):
        """
        Returns the number of rows (and columns) the stream addresses.
        """
        return 2**self.scale

    def total_triples(self):
        return self.batch_size * self.num_batches

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        config = dataclasses.asdict(self)
        config["skew"] = list(self.skew)
        return config


def mix64(values):
    """
    Applies the splitmix64 finalizer to a uint64 array (mod 2**64).
    """
    z = np.asarray(values, dtype=np.uint64).copy()
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


def batch_key(seed, batch_index):
    """
    Returns the 64-bit key of a batch's random substream as a Python int.
    """
    inner = int(mix64(np.array([(batch_index + GOLDEN) & _MASK64],
                               dtype=np.uint64))[0])
    return int(mix64(np.array([seed ^ inner], dtype=np.uint64))[0])


def draws(key, start, count):
    """
    Returns draws start ... start + count - 1 of the substream with the given
    key as a uint64 array.
    """
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        states = np.uint64(key) + counters * np.uint64(GOLDEN)
    return mix64(states)


def _uniforms(raw):
    """
    Splits each 64-bit draw into two uniforms in [0, 1), high half first.
    """
    halves = np.empty(raw.shape + (2,), dtype=np.float64)
    halves[..., 0] = (raw >> np.uint64(32)).astype(np.float64)
    halves[..., 1] = (raw & np.uint64(0xFFFFFFFF)).astype(np.float64)
    return halves.reshape(raw.shape[:-1] + (-1,)) / _TWO_POW_32


def generate_batch(cfg, batch_index):
    """
    Returns batch number batch_index of the stream as an EdgeBatch of exactly
    cfg.batch_size triples with endpoints in [0, 2**cfg.scale).

    cfg: StreamConfig
        The stream to draw from.
    batch_index: int
        Which batch, 0 <= batch_index < cfg.num_batches.
    """
    if not 0 <= batch_index < cfg.num_batches:
        raise StreamConfigError("batch index {} is outside [0, {})".format(
            batch_index, cfg.num_batches
        ))
    size, scale = cfg.batch_size, cfg.scale
    key = batch_key(cfg.seed, batch_index)
    draws_per_edge = (scale + 1) // 2

    raw = draws(key, 0, size * draws_per_edge).reshape(size, draws_per_edge)
    uniforms = _uniforms(raw)[:, :scale]

    a, b, c, _ = cfg.skew
    # Quadrant per level: row bit set for c and d, col bit set for b and d
    row_bits = uniforms >= a + b
    col_bits = ((uniforms >= a) & (uniforms < a + b)) | (uniforms >= a + b + c)

    weights = np.left_shift(np.uint64(1),
                            np.arange(scale - 1, -1, -1, dtype=np.uint64))
    rows = (row_bits.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
    cols = (col_bits.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)

    if cfg.value_mode == "random":
        value_draws = draws(key, size * draws_per_edge, size)
        vals = (value_draws % np.uint64(RANDOM_VALUE_MAX)).astype(np.int64) + 1
    else:
        vals = np.ones(size, dtype=np.int64)
    return hypersparse.EdgeBatch(rows, cols, vals)


def iter_batches(cfg, indices=None):
    """
    Yields the batches with the given indices (every batch by default).
    """
    if indices is None:
        indices = range(cfg.num_batches)
    for batch_index in indices:
        yield generate_batch(cfg, batch_index)


def degree_histogram(triples):
    """
    Returns {degree: number of rows with that out-degree}, where a row's
    out-degree is the number of triples it appears in (repeated (row, col)
    pairs count every time).

    triples: hypersparse.EdgeBatch, [hypersparse.EdgeTriple, ]
        The triples to count.
    """
    batch = hypersparse.as_batch(triples)
    if not len(batch):
        return {}
    _, row_degrees = np.unique(batch.rows, return_counts=True)
    degrees, counts = np.unique(row_degrees, return_counts=True)
    return dict(zip(degrees.tolist(), counts.tolist()))


def histogram_summary(histogram):
    """
    Returns (max degree, mean degree) over the rows counted by a degree
    histogram.
    """
    if not histogram:
        return 0, 0.0
    rows = sum(histogram.values())
    edges = sum(degree * count for degree, count in histogram.items())
    return max(histogram), edges / rows


def tail_slope(histogram, min_degree=1):
    """
    Returns the least-squares slope of log(density) against log(degree) for
    the degree distribution's tail. Degrees at or above min_degree are
    grouped into power-of-two bins [2**k, 2**(k+1)), and each bin's density is
    its row count divided by its width. Returns NaN with fewer than two
    non-empty bins.
    """
    binned = {}
    for degree, count in histogram.items():
        if degree >= min_degree:
            exponent = int(math.log2(degree))
            binned[exponent] = binned.get(exponent, 0) + count
    if len(binned) < 2:
        return float("nan")
    exponents = np.array(sorted(binned), dtype=np.float64)
    density = np.array([binned[int(e)] for e in exponents]) / 2.0**exponents
    centers = 2.0**exponents * 1.5
    slope, _ = np.polyfit(np.log(centers), np.log(density), 1)
    return float(slope)


def dump_stream(cfg, path):
    """
    Writes every batch of the stream to a TSV edge list and returns the
    number of triples written.
    """
    written = edgelist.write_batches(path, iter_batches(cfg))
    logger.info("Wrote %s triples (%s batches of %s) to %s", written,
                cfg.num_batches, cfg.batch_size, path)
    return written
