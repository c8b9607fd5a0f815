"""Packed bit-vector helpers shared by the numeric kernels.

Strings of length N are stored as rows of ``ceil(N / 64)`` uint64 words.
Word ``j`` holds positions ``64j .. min(64j + 64, N) - 1`` right-aligned,
with the lowest position in the most significant occupied bit.  Under this
layout, comparing rows word by word as unsigned integers is the same as
comparing the strings lexicographically.
"""

import numpy as np
from numba import njit
from numba.extending import intrinsic

WORD = 64


@intrinsic
def popcount(typingctx, x):
    """Hardware population count on an integer (LLVM ``ctpop``)."""

    def codegen(context, builder, sig, args):
        return builder.ctpop(args[0])

    return x(x), codegen


@njit(cache=True, inline="always")
def row_hamming(words, a, b):
    d = 0
    for j in range(words.shape[1]):
        d += np.int64(popcount(words[a, j] ^ words[b, j]))
    return d


def n_words(n_bits):
    return max(1, (n_bits + WORD - 1) // WORD)


def chunk_len(n_bits, j):
    return min(WORD, n_bits - WORD * j)


def locate(n_bits, pos):
    """Return (word index, right shift) addressing position ``pos``."""
    j = pos // WORD
    return j, chunk_len(n_bits, j) - 1 - (pos - WORD * j)


def pack_strings(strings, n_bits=None):
    """Pack an iterable of '0'/'1' strings into a (count, words) uint64 array."""
    strings = list(strings)
    if n_bits is None:
        n_bits = len(strings[0]) if strings else 0
    nw = n_words(n_bits)
    out = np.zeros((len(strings), nw), dtype=np.uint64)
    for i, s in enumerate(strings):
        if len(s) != n_bits:
            raise ValueError(f"string {s!r} has length {len(s)}, expected {n_bits}")
        for j in range(nw):
            chunk = s[WORD * j : WORD * j + WORD]
            out[i, j] = int(chunk, 2) if chunk else 0
    return out


def unpack_row(row, n_bits):
    parts = []
    for j in range(n_words(n_bits)):
        length = chunk_len(n_bits, j)
        if length > 0:
            parts.append(format(int(row[j]), f"0{length}b"))
    return "".join(parts)


def bit_column(words, n_bits, pos):
    """The bit at ``pos`` for every row, as uint8."""
    j, shift = locate(n_bits, pos)
    return ((words[:, j] >> np.uint64(shift)) & np.uint64(1)).astype(np.uint8)


def unpack_bits(words, n_bits):
    """Expand packed rows to a (count, n_bits) uint8 matrix."""
    out = np.empty((words.shape[0], n_bits), dtype=np.uint8)
    for pos in range(n_bits):
        out[:, pos] = bit_column(words, n_bits, pos)
    return out


def gather_bits(words, n_bits, positions):
    """Extract ``positions`` (in the given order) from each row into new packed rows."""
    positions = list(positions)
    length = len(positions)
    out = np.zeros((words.shape[0], n_words(length)), dtype=np.uint64)
    for t, pos in enumerate(positions):
        col = bit_column(words, n_bits, pos).astype(np.uint64)
        j, shift = locate(length, t)
        out[:, j] |= col << np.uint64(shift)
    return out


def flip_bit(words, n_bits, pos):
    """Copy of ``words`` with position ``pos`` flipped in every row."""
    out = words.copy()
    j, shift = locate(n_bits, pos)
    out[:, j] ^= np.uint64(1) << np.uint64(shift)
    return out


def ints_to_words(values, n_bits):
    """Pack non-negative integers (binary value of the string) for n_bits <= 64."""
    if n_bits > WORD:
        raise ValueError("integer packing only supports n_bits <= 64")
    return np.asarray(values, dtype=np.uint64).reshape(-1, 1).copy()
