"""Numba helpers for uint64 bitset rows."""

from __future__ import annotations

import numba as nb
import numpy as np

_DEBRUIJN = np.uint64(0x03F79D71B4CB0A89)
_DB_TABLE = np.array(
    [
        0, 1, 48, 2, 57, 49, 28, 3, 61, 58, 50, 42, 38, 29, 17, 4,
        62, 55, 59, 36, 53, 51, 43, 22, 45, 39, 33, 30, 24, 18, 12, 5,
        63, 47, 56, 27, 60, 41, 37, 16, 54, 35, 52, 21, 44, 32, 23, 11,
        46, 26, 40, 15, 34, 20, 31, 10, 25, 14, 19, 9, 13, 8, 7, 6,
    ],
    dtype=np.int64,
)
ONE = np.uint64(1)
ZERO = np.uint64(0)


@nb.njit(cache=True, inline="always")
def ctz(x):
    """Index of the lowest set bit of a nonzero uint64."""
    lowest = x & (~x + ONE)
    return _DB_TABLE[(lowest * _DEBRUIJN) >> np.uint64(58)]


@nb.njit(cache=True, inline="always")
def popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@nb.njit(cache=True)
def count_bits(row):
    c = 0
    for w in range(row.shape[0]):
        c += popcount(row[w])
    return c


@nb.njit(cache=True)
def is_empty(row):
    for w in range(row.shape[0]):
        if row[w] != ZERO:
            return False
    return True


@nb.njit(cache=True, inline="always")
def set_bit(row, i):
    row[i >> 6] |= ONE << np.uint64(i & 63)


@nb.njit(cache=True, inline="always")
def clear_bit(row, i):
    row[i >> 6] &= ~(ONE << np.uint64(i & 63))


@nb.njit(cache=True, inline="always")
def test_bit(row, i):
    return (row[i >> 6] >> np.uint64(i & 63)) & ONE != ZERO
