"""Rows of binary cells packed into little-endian ``uint64`` words.

Bit ``i`` of a row lives in word ``i // 64`` at position ``i % 64``.  All
operations act on arrays of shape ``(..., H, nwords)`` so that a stack of
independent grids steps together.
"""
from __future__ import annotations

import numpy as np

WORD = 64
_ONE = np.uint64(1)
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


def nwords(width: int) -> int:
    return (width + WORD - 1) // WORD


def pack(cells: np.ndarray) -> np.ndarray:
    cells = np.asarray(cells).astype(bool)
    w = cells.shape[-1]
    nw = nwords(w)
    padded = np.zeros(cells.shape[:-1] + (nw * WORD,), dtype=bool)
    padded[..., :w] = cells
    by = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(by).view("<u8").astype(np.uint64)


def unpack(words: np.ndarray, width: int) -> np.ndarray:
    by = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    bits = np.unpackbits(by, axis=-1, bitorder="little")
    return bits[..., :width]


def row_mask(width: int) -> np.ndarray:
    """Words with exactly the ``width`` valid bits set."""
    return pack(np.ones(width, dtype=bool))


def bits_mask(width: int, lo: int, hi: int) -> np.ndarray:
    """Words with bits ``lo <= i < hi`` set (clipped to the row)."""
    m = np.zeros(width, dtype=bool)
    m[max(lo, 0) : max(min(hi, width), 0)] = True
    return pack(m)


def _funnel(words: np.ndarray, k: int) -> np.ndarray:
    """Zero-filled shift: bit ``i`` of the result is bit ``i + k`` of the input."""
    nw = words.shape[-1]
    out = np.zeros_like(words)
    if k == 0:
        out[...] = words
        return out
    if k > 0:
        q, b = divmod(k, WORD)
        if q >= nw:
            return out
        src = words[..., q:]
        if b == 0:
            out[..., : nw - q] = src
        else:
            out[..., : nw - q] = src >> np.uint64(b)
            out[..., : nw - q - 1] |= src[..., 1:] << np.uint64(WORD - b)
        return out
    q, b = divmod(-k, WORD)
    if q >= nw:
        return out
    src = words[..., : nw - q]
    if b == 0:
        out[..., q:] = src
    else:
        out[..., q:] = src << np.uint64(b)
        out[..., q + 1 :] |= src[..., :-1] >> np.uint64(WORD - b)
    return out


class Shifter:
    """Neighbor lookups on packed grids of a fixed width and boundary.

    ``get(words, dx, dy)`` returns the grid whose cell ``(x, y)`` holds the
    input cell ``(x + dx, y + dy)``, with out-of-range cells read as 0
    (``"zero"``), as 1 (``"one"``) or wrapped (``"periodic"``).
    """

    def __init__(self, width: int, boundary: str):
        self.width = width
        self.boundary = boundary
        self.mask = row_mask(width)
        self._fill: dict[int, np.ndarray] = {}

    def _fill_mask(self, dx: int) -> np.ndarray:
        if dx not in self._fill:
            if dx > 0:
                self._fill[dx] = bits_mask(self.width, self.width - dx, self.width)
            else:
                self._fill[dx] = bits_mask(self.width, 0, -dx)
        return self._fill[dx]

    def cols(self, words: np.ndarray, dx: int) -> np.ndarray:
        if dx == 0:
            return words
        w = self.width
        if self.boundary == "periodic":
            dx %= w
            if dx == 0:
                return words
            out = _funnel(words, dx) | _funnel(words, dx - w)
        else:
            out = _funnel(words, dx)
            if self.boundary == "one":
                out |= self._fill_mask(dx)
        return out & self.mask

    def rows(self, words: np.ndarray, dy: int) -> np.ndarray:
        if dy == 0:
            return words
        h = words.shape[-2]
        if self.boundary == "periodic":
            return np.roll(words, -dy, axis=-2)
        out = np.empty_like(words)
        fill = self.mask if self.boundary == "one" else np.zeros_like(self.mask)
        if abs(dy) >= h:
            out[...] = fill
            return out
        if dy > 0:
            out[..., : h - dy, :] = words[..., dy:, :]
            out[..., h - dy :, :] = fill
        else:
            out[..., -dy:, :] = words[..., : h + dy, :]
            out[..., : -dy, :] = fill
        return out

    def get(self, words: np.ndarray, dx: int, dy: int) -> np.ndarray:
        return self.cols(self.rows(words, dy), dx)


def step_family(words: np.ndarray, sets, shifter: Shifter) -> np.ndarray:
    """One synchronous update of a neighbor-family rule on packed grids."""
    cache: dict = {}

    def nb(c):
        if c not in cache:
            cache[c] = shifter.get(words, c[0], c[1])
        return cache[c]

    out = words.copy()
    for s in sets:
        it = iter(s)
        acc = nb(next(it)).copy()
        for c in it:
            acc &= nb(c)
        out |= acc
    return out


def popcount(words: np.ndarray, axis=None) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=axis, dtype=np.int64)
