"""Binary block encoding of ``F_T`` and the binary automaton ``G_T``.

Each coarse state becomes an ``n x n`` block.  ``M`` is the all-1 block; any
other state has an outer ring of 1s, a ring of 0s inside it and an
``(n-4) x (n-4)`` payload holding the binary digits of the state's rank
among the non-``M`` states, least significant bit first in row-major order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import Boundary, Window
from .rules import RuleKernel
from .tmca import CompiledTM

INVALID = -1


def min_block_side(states: int) -> int:
    n = 5
    while 2 ** ((n - 4) ** 2) < states - 1:
        n += 1
    return n


@dataclass
class BlockCode:
    n: int
    states: int
    m: int

    def __post_init__(self):
        if self.n < 5 or 2 ** ((self.n - 4) ** 2) < self.states - 1:
            raise ValueError(f"block side {self.n} cannot hold {self.states} states")

    @classmethod
    def for_alphabet(cls, states: int, m: int, n: int | None = None) -> "BlockCode":
        return cls(n or min_block_side(states), states, m)

    @property
    def rings(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Masks of the outer ring, the inner ring and the payload."""
        n = self.n
        d = np.minimum.outer(np.minimum(np.arange(n), np.arange(n)[::-1]),
                             np.minimum(np.arange(n), np.arange(n)[::-1]))
        return d == 0, d == 1, d >= 2

    def block(self, state: int) -> np.ndarray:
        if state == self.m:
            return np.ones((self.n, self.n), dtype=np.uint8)
        outer, _, payload = self.rings
        rank = state - (state > self.m)
        b = outer.astype(np.uint8)
        k = (self.n - 4) ** 2
        b[payload] = (rank >> np.arange(k)) & 1
        return b

    def codebook(self) -> np.ndarray:
        return np.stack([self.block(s) for s in range(self.states)])


def encode_array(code: BlockCode, coarse: np.ndarray) -> np.ndarray:
    book = code.codebook()
    c = np.asarray(coarse, dtype=np.int64)
    blocks = book[c]  # (h, w, n, n)
    h, w = c.shape
    return blocks.transpose(0, 2, 1, 3).reshape(h * code.n, w * code.n)


def block_states(code: BlockCode, fine: np.ndarray) -> np.ndarray:
    """Decoded state of the block with lower-left corner at every position, ``INVALID`` if none.

    Works on stacks; the result has shape ``(..., H-n+1, W-n+1)``.
    """
    n = code.n
    x = np.asarray(fine, dtype=np.int64)
    win = np.lib.stride_tricks.sliding_window_view(x, (n, n), axis=(-2, -1))
    outer, inner, payload = code.rings
    k = (n - 4) ** 2
    ones = (win * outer).sum(axis=(-2, -1)) == outer.sum()
    zeros = (win * inner).sum(axis=(-2, -1)) == 0
    weights = np.zeros((n, n), dtype=np.int64)
    weights[payload] = 1 << np.arange(k)
    rank = (win * weights).sum(axis=(-2, -1))
    full = win.sum(axis=(-2, -1)) == n * n
    ok = ones & zeros & (rank < code.states - 1)
    state = rank + (rank >= code.m)
    return np.where(full, code.m, np.where(ok, state, INVALID))


def decode_array(code: BlockCode, fine: np.ndarray) -> np.ndarray:
    """Coarse states of an aligned fine array; ``INVALID`` marks blocks outside the codebook."""
    n = code.n
    h, w = fine.shape
    if h % n or w % n:
        raise ValueError(f"shape {fine.shape} is not a multiple of the block side {n}")
    return block_states(code, fine)[::n, ::n]


def block_encode(code: BlockCode, coarse: Window) -> Window:
    ox, oy = coarse.offset
    return Window(encode_array(code, coarse.cells), coarse.boundary,
                  coarse.exact_margin * code.n, (ox * code.n, oy * code.n))


def block_decode(code: BlockCode, fine: Window) -> tuple[np.ndarray, np.ndarray]:
    """Coarse states and the mask of invalid blocks; the window must be block aligned."""
    if fine.offset[0] % code.n or fine.offset[1] % code.n:
        raise ValueError("window offset is not block aligned")
    states = decode_array(code, fine.cells)
    return states, states == INVALID


def _gt_apply(x: np.ndarray, code: BlockCode, ct: CompiledTM) -> np.ndarray:
    n, q, m = code.n, code.states, code.m
    r = 2 * n - 1
    x = np.asarray(x, dtype=np.uint8)
    h, w = x.shape[-2:]
    oh, ow = h - 2 * r, w - 2 * r
    s = block_states(code, x)
    table, active = ct.table, ct.active
    found = np.zeros(x.shape[:-2] + (oh, ow), dtype=np.int64)
    dies = np.zeros(found.shape, dtype=bool)
    for v in range(n):
        for u in range(n):
            def nb(dy, dx):
                y0, x0 = r - v + dy * n, r - u + dx * n
                return s[..., y0 : y0 + oh, x0 : x0 + ow]

            centre = nb(0, 0)
            here = (centre != INVALID) & (centre != m)
            if not here.any():
                continue
            found += here
            patch = {(dy, dx): nb(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1)}
            valid = np.logical_and.reduce([p != INVALID for p in patch.values()])
            c = {k: np.where(valid, p, m) for k, p in patch.items()}
            bad = np.zeros(found.shape, dtype=bool)
            for wy in (-1, 0):
                for wx in (-1, 0):
                    bl, br = c[(wy, wx)], c[(wy, wx + 1)]
                    tl, tr = c[(wy + 1, wx)], c[(wy + 1, wx + 1)]
                    bad |= ~table[((bl * q + br) * q + tl) * q + tr]
            act = active[c[(0, 0)]]
            bad |= act[..., 0] & (c[(1, 0)] == m)
            bad |= act[..., 1] & (c[(0, 1)] == m)
            bad |= act[..., 2] & (c[(-1, 0)] == m)
            bad |= act[..., 3] & (c[(0, -1)] == m)
            dies |= here & (~valid | bad)
    inner = x[..., r : r + oh, r : r + ow]
    stay = (inner == 0) & (found == 1) & ~dies
    return np.where(stay, 0, 1).astype(np.uint8)


def gt_kernel(code: BlockCode, ct: CompiledTM) -> RuleKernel:
    """Binary freezing automaton that simulates ``F_T`` on encoded configurations.

    A 0-cell stays 0 only if exactly one alignment places it in a valid
    non-``M`` block, the eight blocks around that block are valid too, and
    ``F_T`` keeps the decoded centre state.
    """
    if code.states != ct.alphabet.size or code.m != ct.alphabet.m:
        raise ValueError("block code does not match the compiled alphabet")
    return RuleKernel(
        name="tmca-G",
        radius=2 * code.n - 1,
        apply_valid=lambda x: _gt_apply(x, code, ct),
        params={"n_code": code.n},
    )
