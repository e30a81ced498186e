"""Byte frequency distribution (BFD) of raw content.

The BFD is the only view of a file the pipeline ever takes: counts of
each byte value 0..255, normalized to relative frequencies. Byte order is
discarded here, which is what makes classification invariant to
scrambling.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Union

import numpy as np

from bfd_fileprint.errors import DimensionMismatch, EmptyInput
from bfd_fileprint.mappings import BFD_BINS, READ_CHUNK_SIZE


@dataclass(frozen=True)
class ByteHistogram:
    """Raw counts per byte value plus the total length."""

    counts: np.ndarray
    total: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (BFD_BINS,):
            raise DimensionMismatch(f"Histogram needs {BFD_BINS} bins, got shape {counts.shape}")
        if (counts < 0).any():
            raise ValueError("Histogram counts must be non-negative")
        if int(counts.sum()) != self.total:
            raise ValueError(f"Histogram counts sum to {int(counts.sum())}, total is {self.total}")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    def __add__(self, other: "ByteHistogram") -> "ByteHistogram":
        return ByteHistogram(self.counts + other.counts, self.total + other.total)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ByteHistogram):
            return NotImplemented
        return self.total == other.total and np.array_equal(self.counts, other.counts)


@dataclass(frozen=True)
class NormalizedBfd:
    """Relative byte frequencies; sums to 1."""

    freq: np.ndarray

    def __post_init__(self):
        freq = np.asarray(self.freq, dtype=np.float64)
        if freq.shape != (BFD_BINS,):
            raise DimensionMismatch(f"BFD needs {BFD_BINS} bins, got shape {freq.shape}")
        freq.flags.writeable = False
        object.__setattr__(self, "freq", freq)


def count_bytes(data: Union[bytes, bytearray, memoryview]) -> ByteHistogram:
    """Count occurrences of every byte value in `data`."""
    buf = np.frombuffer(data, dtype=np.uint8)
    counts = np.bincount(buf, minlength=BFD_BINS).astype(np.int64)
    return ByteHistogram(counts, int(buf.size))


def normalize(hist: ByteHistogram) -> NormalizedBfd:
    """Divide each bin by the total byte count.

    Raises:
        EmptyInput: for a zero-length input, which has no distribution.
    """
    if hist.total == 0:
        raise EmptyInput("Cannot normalize the byte histogram of empty input")
    return NormalizedBfd(hist.counts / float(hist.total))


def histogram_stream(
    stream: BinaryIO,
    chunk_size: int = READ_CHUNK_SIZE,
    limit: int | None = None,
) -> ByteHistogram:
    """Histogram a binary stream in bounded-size chunks.

    With `limit`, at most that many bytes are consumed.
    """
    counts = np.zeros(BFD_BINS, dtype=np.int64)
    total = 0
    while limit is None or total < limit:
        chunk = stream.read(chunk_size if limit is None else min(chunk_size, limit - total))
        if not chunk:
            break
        counts += np.bincount(np.frombuffer(chunk, dtype=np.uint8), minlength=BFD_BINS)
        total += len(chunk)
    return ByteHistogram(counts, total)


def histogram_file(path: Union[str, Path], chunk_size: int = READ_CHUNK_SIZE) -> ByteHistogram:
    """Histogram a file without holding it in memory."""
    with open(path, "rb") as f:
        return histogram_stream(f, chunk_size)


def bfd_of(data: Union[bytes, bytearray, memoryview]) -> NormalizedBfd:
    return normalize(count_bytes(data))
