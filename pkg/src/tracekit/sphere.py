"""Seeded sampling of uniform unit vectors on the sphere of C^n.

Randomness is counter-based.  A stream is keyed by the pair
(master_seed, stream_index), both 64-bit, fed to a Philox-4x64 bit
generator as key = master_seed * 2**64 + stream_index.  Any substream
can therefore be opened directly, in any order, on any worker, and
always yields the same draws.

Standard normals come from inverting the normal CDF on the centered
53-bit grid: a raw 64-bit word r maps to u = ((r >> 11) + 0.5) * 2**-53,
which lies strictly inside (0, 1), then z = ndtri(u).  One word per
normal, no rejection, so the mapping from counter position to draw is
fixed for all time.

A unit vector in C^n consumes exactly 2n words: entry k is built from
words (2k, 2k+1) as (real, imag), then the vector is divided by its
Euclidean norm.  Rotation invariance of the Gaussian makes the result
uniform on the sphere.  In the measure-zero event that the norm
underflows below 1e-150 the 2n words are discarded and redrawn.

Estimators shard their draws into fixed-size chunks: sample j of a run
based at stream_index b is drawn from stream b + j // chunk_size, at
offset j % chunk_size within it.  The layout depends only on
(master_seed, b, chunk_size), never on how chunks are assigned to
workers.  Offsets b + 2**32 and b + 2**48 are reserved for auxiliary
draws (paired second estimates and probe vectors), so a single run keeps
below 2**32 chunks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

__all__ = [
    "StreamSpec",
    "GaussianStream",
    "spawn_stream",
    "gaussian_vector",
    "gaussian_matrix",
    "sample_unit_vector",
    "sample_unit_vectors",
    "sample_unit_vectors_chunked",
    "CHUNK_OFFSET_PAIRED",
    "CHUNK_OFFSET_PROBES",
]

# Reserved stream_index offsets relative to an estimate's base index.
CHUNK_OFFSET_PAIRED = 2**32
CHUNK_OFFSET_PROBES = 2**48

_TINY_NORM = 1e-150
_U64 = np.uint64


@dataclass(frozen=True)
class StreamSpec:
    """Serializable address of one random substream."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for label, value in (
            ("master_seed", self.master_seed),
            ("stream_index", self.stream_index),
        ):
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise ValueError(f"{label} must be an integer, got {value!r}")
            if not 0 <= int(value) < 2**64:
                raise ValueError(f"{label} must be in [0, 2**64), got {value}")

    def offset(self, delta: int) -> "StreamSpec":
        """The spec `delta` substreams ahead of this one."""
        return StreamSpec(self.master_seed, self.stream_index + delta)


class GaussianStream:
    """Single consumer of one substream's N(0, 1) draws, in counter order."""

    def __init__(self, spec: StreamSpec):
        self.spec = spec
        key = (int(spec.master_seed) << 64) | int(spec.stream_index)
        self._bits = np.random.Philox(key=key)

    def raw_words(self, count: int) -> np.ndarray:
        """Next `count` raw 64-bit words (uint64)."""
        if count < 0:
            raise ValueError(f"count must be >= 0, got {count}")
        return self._bits.random_raw(count)

    def gaussians(self, count: int) -> np.ndarray:
        """Next `count` standard normals (float64), one raw word each."""
        raw = self.raw_words(count)
        u = ((raw >> _U64(11)).astype(np.float64) + 0.5) * 2.0**-53
        return ndtri(u)


def spawn_stream(spec: StreamSpec) -> GaussianStream:
    return GaussianStream(spec)


def gaussian_vector(stream: GaussianStream, n: int) -> np.ndarray:
    """Standard complex Gaussian vector: entry k from words (2k, 2k+1)."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    g = stream.gaussians(2 * n).reshape(n, 2)
    return np.ascontiguousarray(g[:, 0] + 1j * g[:, 1])


def gaussian_matrix(stream: GaussianStream, n: int) -> np.ndarray:
    """n x n matrix of standard complex Gaussians, entries in row-major order."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    g = stream.gaussians(2 * n * n).reshape(n, n, 2)
    return np.ascontiguousarray(g[:, :, 0] + 1j * g[:, :, 1])


def _row_norms(z: np.ndarray) -> np.ndarray:
    # spelled out so the normalization is a reproducible formula, not a
    # library code path: sqrt of the summed squared components
    return np.sqrt(np.sum(z.real * z.real + z.imag * z.imag, axis=-1))


def sample_unit_vectors(stream: GaussianStream, n: int, count: int) -> np.ndarray:
    """Draw `count` unit vectors as the rows of a (count, n) complex array.

    Consumes exactly 2*n words per vector (plus 2*n per underflow
    redraw, which at 1e-150 never happens in practice).  Each row is
    divided by sqrt(sum(re^2 + im^2)) of its entries.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    g = stream.gaussians(2 * n * count).reshape(count, n, 2)
    z = g[:, :, 0] + 1j * g[:, :, 1]
    norms = _row_norms(z)
    while True:
        bad = np.flatnonzero(norms < _TINY_NORM)
        if bad.size == 0:
            break
        g = stream.gaussians(2 * n * bad.size).reshape(bad.size, n, 2)
        z[bad] = g[:, :, 0] + 1j * g[:, :, 1]
        norms[bad] = _row_norms(z[bad])
    return np.ascontiguousarray(z / norms[:, None])


def sample_unit_vector(stream: GaussianStream, n: int) -> np.ndarray:
    """Draw one unit vector from the stream."""
    return sample_unit_vectors(stream, n, 1)[0]


def sample_unit_vectors_chunked(
    spec: StreamSpec, n: int, count: int, chunk_size: int = 4096
) -> np.ndarray:
    """Draw `count` unit vectors in the sharded substream layout.

    Vector j comes from stream spec.offset(j // chunk_size) at offset
    j % chunk_size.  This is the exact sequence an estimator based at
    `spec` consumes, independent of worker count.
    """
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    out = np.empty((count, n), dtype=np.complex128)
    for c in range((count + chunk_size - 1) // chunk_size):
        lo = c * chunk_size
        hi = min(lo + chunk_size, count)
        stream = spawn_stream(spec.offset(c))
        out[lo:hi] = sample_unit_vectors(stream, n, hi - lo)
    return out
