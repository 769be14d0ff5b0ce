"""Finite-window simulation of rule kernels.

Three steppers share one contract: the word-parallel stepper for binary
neighbor-family rules, the array stepper for any kernel (it calls the
kernel's vectorized ``apply_valid`` on a padded copy), and a per-cell
stepper that evaluates the local rule patch by patch and serves as the
reference in tests.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable

import numpy as np

from . import bitgrid
from .errors import AlphabetMismatch, ExactnessViolated
from .geometry import Vec
from .rules import NeighborFamily, RuleKernel


class Boundary(str, Enum):
    ZERO = "zero"
    ONE = "one"
    PERIODIC = "periodic"


@dataclass
class Window:
    """Rectangular view of a configuration.

    ``cells[y, x]`` is the state at absolute position ``offset + (x, y)``.
    Cells closer than ``exact_margin`` to the border may differ from the
    infinite-lattice evolution of the embedded configuration; the margin
    grows by the rule radius on every step under a Zero or One boundary and
    is unaffected under a Periodic one.
    """

    cells: np.ndarray
    boundary: Boundary = Boundary.ZERO
    exact_margin: int = 0
    offset: Vec = (0, 0)
    states: int = 2

    def __post_init__(self):
        self.cells = np.ascontiguousarray(self.cells, dtype=np.uint8)
        self.boundary = Boundary(self.boundary)
        if self.cells.ndim != 2:
            raise ValueError("window cells must be a 2-d array")

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    def index_of(self, p: Vec) -> tuple[int, int]:
        """Array index ``(row, col)`` of absolute position ``p``."""
        return p[1] - self.offset[1], p[0] - self.offset[0]

    def contains(self, p: Vec) -> bool:
        i, j = self.index_of(p)
        return 0 <= i < self.height and 0 <= j < self.width

    def at(self, p: Vec) -> int:
        i, j = self.index_of(p)
        return int(self.cells[i, j])

    def border_distance(self, p: Vec) -> int:
        i, j = self.index_of(p)
        return min(i, j, self.height - 1 - i, self.width - 1 - j)

    def is_exact(self, p: Vec) -> bool:
        if self.boundary is Boundary.PERIODIC:
            return self.contains(p)
        return self.contains(p) and self.border_distance(p) >= self.exact_margin

    def exact_slice(self) -> tuple[slice, slice]:
        m = 0 if self.boundary is Boundary.PERIODIC else self.exact_margin
        return slice(m, self.height - m), slice(m, self.width - m)

    def copy(self) -> "Window":
        return replace(self, cells=self.cells.copy())


@dataclass
class RunReport:
    steps_taken: int
    fixed: bool
    changed_cells_per_step: list[int] = field(default_factory=list)


def pad(cells: np.ndarray, r: int, boundary: Boundary, fill_one: int = 1) -> np.ndarray:
    """Extend the last two axes by ``r`` cells on each side."""
    if r == 0:
        return cells
    if boundary is Boundary.PERIODIC:
        h, w = cells.shape[-2:]
        rows = np.arange(-r, h + r) % h
        cols = np.arange(-r, w + r) % w
        return cells[..., rows[:, None], cols[None, :]]
    value = 0 if boundary is Boundary.ZERO else fill_one
    widths = [(0, 0)] * (cells.ndim - 2) + [(r, r), (r, r)]
    return np.pad(cells, widths, constant_values=value)


def _check_alphabet(w: Window, k: RuleKernel) -> None:
    if w.states != k.states or (w.cells.size and int(w.cells.max()) >= k.states):
        raise AlphabetMismatch(f"window has {w.states} states, kernel {k.name!r} has {k.states}")


def _next_margin(w: Window, r: int) -> int:
    if w.boundary is Boundary.PERIODIC:
        return w.exact_margin
    cap = (min(w.width, w.height) + 1) // 2
    return min(w.exact_margin + r, cap)


def _packable(k: RuleKernel) -> bool:
    return k.binary and k.family is not None


def step_array(cells: np.ndarray, k: RuleKernel, boundary: Boundary) -> np.ndarray:
    return k.apply_valid(pad(cells, k.radius, boundary, k.maximal)).astype(np.uint8)


def step_scalar(cells: np.ndarray, k: RuleKernel, boundary: Boundary) -> np.ndarray:
    """Reference stepper: one local-rule evaluation per cell."""
    r = k.radius
    p = pad(cells, r, boundary, k.maximal)
    out = np.empty_like(cells)
    for y in range(cells.shape[0]):
        for x in range(cells.shape[1]):
            out[y, x] = k.local(p[y : y + 2 * r + 1, x : x + 2 * r + 1])
    return out


def step_packed(cells: np.ndarray, family: NeighborFamily, boundary: Boundary) -> np.ndarray:
    words = bitgrid.pack(cells)
    sh = bitgrid.Shifter(cells.shape[-1], boundary.value)
    out = bitgrid.step_family(words, [sorted(s) for s in family.sets], sh)
    return bitgrid.unpack(out, cells.shape[-1])


def step(w: Window, k: RuleKernel, method: str = "auto") -> Window:
    """Synchronously update every cell of the window."""
    _check_alphabet(w, k)
    if method == "auto":
        method = "packed" if _packable(k) else "array"
    if method == "packed":
        if not _packable(k):
            raise ValueError("packed stepping needs a binary family kernel")
        cells = step_packed(w.cells, k.family, w.boundary)
    elif method == "array":
        cells = step_array(w.cells, k, w.boundary)
    elif method == "scalar":
        cells = step_scalar(w.cells, k, w.boundary)
    else:
        raise ValueError(f"unknown method {method!r}")
    return replace(w, cells=cells, exact_margin=_next_margin(w, k.radius))


class _Runner:
    """Keeps the state in the stepper's native form between steps."""

    def __init__(self, w: Window, k: RuleKernel):
        self.w, self.k = w, k
        self.packed = _packable(k)
        if self.packed:
            self.sets = [sorted(s) for s in k.family.sets]
            self.sh = bitgrid.Shifter(w.width, w.boundary.value)
            self.state = bitgrid.pack(w.cells)
        else:
            self.state = w.cells
        self.margin = w.exact_margin

    def _next(self):
        if self.packed:
            return bitgrid.step_family(self.state, self.sets, self.sh)
        return step_array(self.state, self.k, self.w.boundary)

    def _count(self, new) -> int:
        if self.packed:
            return int(bitgrid.popcount(new ^ self.state))
        return int(np.count_nonzero(new != self.state))

    def advance(self, new=None) -> int:
        if new is None:
            new = self._next()
        changed = self._count(new)
        self.state = new
        if self.w.boundary is not Boundary.PERIODIC:
            cap = (min(self.w.width, self.w.height) + 1) // 2
            self.margin = min(self.margin + self.k.radius, cap)
        return changed

    def cell(self, i: int, j: int) -> int:
        if self.packed:
            return int((self.state[i, j // 64] >> np.uint64(j % 64)) & np.uint64(1))
        return int(self.state[i, j])

    def window(self) -> Window:
        cells = bitgrid.unpack(self.state, self.w.width) if self.packed else self.state
        return replace(self.w, cells=np.asarray(cells, dtype=np.uint8), exact_margin=self.margin)


def run_until_fixed(w: Window, k: RuleKernel, horizon: int | None = None) -> tuple[Window, RunReport]:
    """Step until nothing changes or ``horizon`` steps have been taken.

    ``steps_taken`` counts the steps that changed at least one cell; a run
    cut off by the horizon is ``fixed`` only if one more step would change
    nothing.
    """
    _check_alphabet(w, k)
    if horizon is None:
        horizon = w.width * w.height
    run = _Runner(w, k)
    changes: list[int] = []
    fixed = False
    while True:
        new = run._next()
        if run._count(new) == 0:
            fixed = True
            break
        if len(changes) == horizon:
            break
        changes.append(run.advance(new))
    return run.window(), RunReport(len(changes), fixed, changes)


def origin_fixation_time(w: Window, k: RuleKernel, horizon: int) -> int | None:
    """First time the cell at absolute ``(0, 0)`` reaches the maximal state, or ``None``."""
    _check_alphabet(w, k)
    if not w.contains((0, 0)):
        raise ExactnessViolated("origin is outside the window")
    i, j = w.index_of((0, 0))
    dist = w.border_distance((0, 0))
    run = _Runner(w, k)
    for t in range(horizon + 1):
        if w.boundary is not Boundary.PERIODIC and dist < run.margin:
            raise ExactnessViolated(f"origin leaves the exact region at step {t}")
        if run.cell(i, j) == k.maximal:
            return t
        if t < horizon:
            run.advance()
    return None


def check_fixed_point_family(zero_cells: Iterable[Vec], e: NeighborFamily) -> bool:
    """Whether 0 exactly on ``zero_cells`` (1 elsewhere) is a fixed point of the family rule.

    Decided on the whole lattice: a 0 survives iff every neighbor set,
    translated to it, meets another 0.
    """
    c = set(zero_cells)
    return all(
        any((z[0] + dx, z[1] + dy) in c for dx, dy in s) for z in c for s in e.sets
    )


def embed(zero_cells: Iterable[Vec], margin: int, context: np.ndarray | None = None) -> Window:
    """Window holding 0 on ``zero_cells`` and 1 (or ``context``) elsewhere."""
    pts = list(zero_cells)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, y0 = min(xs) - margin, min(ys) - margin
    w, h = max(xs) - x0 + margin + 1, max(ys) - y0 + margin + 1
    cells = np.ones((h, w), dtype=np.uint8) if context is None else np.array(context[:h, :w], dtype=np.uint8)
    for x, y in pts:
        cells[y - y0, x - x0] = 0
    return Window(cells, Boundary.ONE, 0, (x0, y0))
