"""Freezing automaton ``F_T`` built from a Turing machine.

Valid configurations are rectangular frames of direction states, filled
with the space-time diagram of a halting run from the empty tape, in a sea
of the maximal state ``M``.  ``F_T`` turns into ``M`` every cell that lies in
an invalid 2x2 window or sees ``M`` through an active side, and leaves every
other cell alone.

Tape cells of the diagram are tuples ``(symbol, state, arrival)``: ``state``
is ``None`` away from the head, and ``arrival`` records how the head got
there (``"W"`` from the left, ``"E"`` from the right, ``"B"`` after a left
move bounced on the tape end, ``"I"`` for the initial cell).  Rows are
consecutive time steps, bottom to top.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .engine import Boundary, Window, embed, pad
from .errors import BudgetExceeded
from .rules import RuleKernel

DIRS = ("N", "NE", "E", "SE", "S", "SW", "W", "NW")
M = "M"
MARK = "*"


@dataclass(frozen=True)
class TMSpec:
    states: tuple[str, ...]
    blank: str
    transitions: Mapping[tuple[str, str], tuple[str, str, str]]
    initial: str
    halt: str

    @property
    def symbols(self) -> tuple[str, ...]:
        syms = {self.blank}
        for (_, r), (w, _, _) in self.transitions.items():
            syms |= {r, w}
        return tuple(sorted(syms))

    @classmethod
    def from_json(cls, data: Mapping) -> "TMSpec":
        trans = {}
        for t in data["transitions"]:
            key = (str(t["state"]), str(t["read"]))
            if key in trans:
                raise ValueError(f"duplicate transition for {key}")
            if t["move"] not in ("L", "R"):
                raise ValueError(f"move must be L or R, got {t['move']!r}")
            trans[key] = (str(t["write"]), t["move"], str(t["next"]))
        states = tuple(str(s) for s in data["states"])
        spec = cls(states, str(data.get("blank", "_")), trans, str(data["initial"]), str(data["halt"]))
        for q in {spec.initial, spec.halt} | {q for q, _ in trans} | {n for _, _, n in trans.values()}:
            if q not in states:
                raise ValueError(f"state {q!r} is not declared")
        return spec

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "blank": self.blank,
            "transitions": [
                {"state": q, "read": r, "write": w, "move": m, "next": n}
                for (q, r), (w, m, n) in sorted(self.transitions.items())
            ],
            "initial": self.initial,
            "halt": self.halt,
        }

    @classmethod
    def load(cls, path) -> "TMSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class Run:
    halted: bool
    rows: list[tuple[list[str], int, str, str]]  # tape, head, state, arrival

    @property
    def steps(self) -> int:
        return len(self.rows) - 1

    @property
    def width(self) -> int:
        return max(h for _, h, _, _ in self.rows) + 1


def simulate(tm: TMSpec, budget: int) -> Run:
    """Run from the empty tape; a left move on the first cell leaves the head in place."""
    tape = [tm.blank]
    head, state, arrival = 0, tm.initial, "I"
    rows = [(list(tape), head, state, arrival)]
    for _ in range(budget):
        if state == tm.halt:
            return Run(True, rows)
        key = (state, tape[head])
        if key not in tm.transitions:
            return Run(False, rows)
        w, m, nxt = tm.transitions[key]
        tape[head] = w
        if m == "R":
            head += 1
            arrival = "W"
            if head == len(tape):
                tape.append(tm.blank)
        elif head == 0:
            arrival = "B"
        else:
            head -= 1
            arrival = "E"
        state = nxt
        rows.append((list(tape), head, state, arrival))
    return Run(state == tm.halt, rows)


def normalize(tm: TMSpec) -> TMSpec:
    """Make the machine halt on the rightmost cell it has ever visited.

    Written blanks become a marked blank that behaves like a blank, so
    visited cells stay distinguishable; entering the halt state is replaced
    by a sweep to the first unmarked blank, one step back and a final right
    move into the halt state.
    """
    marked = tm.blank + MARK
    taken = set(tm.states)
    sweep, back = _fresh("sweep", taken), _fresh("back", taken | {"sweep"})
    trans = {}
    for (q, r), (w, m, n) in tm.transitions.items():
        trans[(q, r)] = (marked if w == tm.blank else w, m, sweep if n == tm.halt else n)
    for (q, r), v in list(trans.items()):
        if r == tm.blank:
            trans[(q, marked)] = v
    syms = set(tm.symbols) | {marked}
    for s in syms - {tm.blank}:
        trans[(sweep, s)] = (s, "R", sweep)
        trans[(back, s)] = (s, "R", tm.halt)
    trans[(sweep, tm.blank)] = (marked, "L", back)
    return TMSpec(tm.states + (sweep, back), tm.blank, trans, tm.initial, tm.halt)


def _fresh(name: str, taken: set) -> str:
    while name in taken:
        name += "'"
    return name


# -- alphabet ------------------------------------------------------------------


@dataclass
class FTAlphabet:
    labels: tuple[str, ...]
    tiles: tuple[tuple, ...]  # parallel to the first len(tiles) labels
    m: int

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def dir_index(self, d: str) -> int:
        return self.labels.index(d)


def tile_label(t: tuple) -> str:
    s, q, a = t
    return s if q is None else f"{s}|{q}|{a}"


def _build_alphabet(tm: TMSpec) -> FTAlphabet:
    tiles = [(s, None, None) for s in tm.symbols]
    for q in tm.states:
        for s in tm.symbols:
            for a in ("W", "E", "B"):
                tiles.append((s, q, a))
    tiles.append((tm.blank, tm.initial, "I"))
    labels = tuple(tile_label(t) for t in tiles) + (M,) + DIRS
    return FTAlphabet(labels, tuple(tiles), len(tiles))


# -- valid windows -----------------------------------------------------------

# frame geometry: allowed (left, right) and (below, above) classes
_H = {("M", "M"), ("M", "W"), ("M", "NW"), ("M", "SW"), ("E", "M"), ("NE", "M"), ("SE", "M"),
      ("NW", "N"), ("N", "N"), ("N", "NE"), ("SW", "S"), ("S", "S"), ("S", "SE"),
      ("W", "T"), ("T", "T"), ("T", "E")}
_V = {("M", "M"), ("M", "S"), ("M", "SW"), ("M", "SE"), ("N", "M"), ("NW", "M"), ("NE", "M"),
      ("SW", "W"), ("W", "W"), ("W", "NW"), ("SE", "E"), ("E", "E"), ("E", "NE"),
      ("S", "T"), ("T", "T"), ("T", "N")}
_CLASSES = ("T", "M") + DIRS


def _active_mask(label: str) -> tuple[bool, bool, bool, bool]:
    """Active sides in the order north, east, south, west."""
    if label not in DIRS:
        return True, True, True, True
    return tuple(c not in label for c in "NESW")


class _TileTable:
    """Per-state attribute arrays used by the vectorized window check."""

    def __init__(self, tm: TMSpec, alpha: FTAlphabet):
        n = alpha.size
        sym_ids = {s: i for i, s in enumerate(tm.symbols)}
        state_ids = {q: i for i, q in enumerate(tm.states)}
        arr_ids = {None: 0, "W": 1, "E": 2, "B": 3, "I": 4}
        self.cls = np.zeros(n, np.int8)
        self.sym = np.full(n, -1, np.int16)
        self.head = np.zeros(n, bool)
        self.state = np.full(n, -1, np.int16)
        self.arr = np.zeros(n, np.int8)
        self.halt = np.zeros(n, bool)
        self.out = np.full(n, -1, np.int16)  # symbol left after this row's step
        self.move = np.zeros(n, np.int8)  # +1 right, -1 left, 0 none or stuck
        self.next = np.full(n, -1, np.int16)
        self.stuck = np.zeros(n, bool)  # non-halting head without a transition
        for i, lab in enumerate(alpha.labels):
            if i == alpha.m:
                self.cls[i] = 1
            elif lab in DIRS:
                self.cls[i] = _CLASSES.index(lab)
        for i, (s, q, a) in enumerate(alpha.tiles):
            self.sym[i] = sym_ids[s]
            self.arr[i] = arr_ids[a]
            self.out[i] = sym_ids[s]
            if q is None:
                continue
            self.head[i] = True
            self.state[i] = state_ids[q]
            if q == tm.halt:
                self.halt[i] = True
                continue
            key = (q, s)
            if key not in tm.transitions:
                self.stuck[i] = True
                continue
            w, m, nxt = tm.transitions[key]
            self.out[i] = sym_ids[w]
            self.move[i] = 1 if m == "R" else -1
            self.next[i] = state_ids[nxt]
        self.arr_ids = arr_ids
        self.blank = sym_ids[tm.blank]
        self.q0 = state_ids[tm.initial]


def _geometry_ok(ti: _TileTable) -> np.ndarray:
    c = len(_CLASSES)
    h = np.zeros((c, c), bool)
    v = np.zeros((c, c), bool)
    for a, b in _H:
        h[_CLASSES.index(a), _CLASSES.index(b)] = True
    for a, b in _V:
        v[_CLASSES.index(a), _CLASSES.index(b)] = True
    return h, v


def _window_valid(ti: _TileTable, bl, br, tl, tr) -> np.ndarray:
    """Validity of 2x2 windows given broadcastable state-index arrays."""
    h, v = _geometry_ok(ti)
    cbl, cbr, ctl, ctr = ti.cls[bl], ti.cls[br], ti.cls[tl], ti.cls[tr]
    ok = h[cbl, cbr] & h[ctl, ctr] & v[cbl, ctl] & v[cbr, ctr]
    T = _CLASSES.index("T")
    W_, E_, N_, S_ = (_CLASSES.index(d) for d in ("W", "E", "N", "S"))
    NW_, NE_, SW_, SE_ = (_CLASSES.index(d) for d in ("NW", "NE", "SW", "SE"))
    A = ti.arr_ids

    def vertical(lo, hi):
        """Tape cell ``hi`` directly above tape cell ``lo``."""
        return ((ti.sym[hi] == ti.out[lo]) & ~ti.halt[lo] & ~ti.stuck[lo]
                & (ti.arr[hi] != A["I"]))

    def head_to(cell, state, arrival):
        return ti.head[cell] & (ti.state[cell] == state) & (ti.arr[cell] == A[arrival])

    # interior: all four tape cells
    inner = (cbl == T) & (cbr == T) & (ctl == T) & (ctr == T)
    rule = vertical(bl, tl) & vertical(br, tr)
    right = ti.head[bl] & (ti.move[bl] == 1)
    rule &= (ti.arr[tr] == A["W"]) == right
    rule &= ~right | head_to(tr, ti.next[bl], "W")
    left = ti.head[br] & (ti.move[br] == -1)
    rule &= (ti.arr[tl] == A["E"]) == left
    rule &= ~left | head_to(tl, ti.next[br], "E")
    rule &= ti.arr[tr] != A["B"]
    ok &= ~inner | rule

    # first column, west side of the frame
    west = (cbl == W_) & (cbr == T) & (ctl == W_) & (ctr == T)
    rule = vertical(br, tr) & (ti.arr[tr] != A["W"])
    bounce = ti.head[br] & (ti.move[br] == -1)
    rule &= (ti.arr[tr] == A["B"]) == bounce
    rule &= ~bounce | head_to(tr, ti.next[br], "B")
    ok &= ~west | rule

    # last column, east side: the head may not leave
    east = (cbl == T) & (cbr == E_) & (ctl == T) & (ctr == E_)
    rule = vertical(bl, tl) & ~(ti.head[bl] & (ti.move[bl] == 1)) & (ti.arr[tl] != A["E"])
    ok &= ~east | rule

    # bottom row: blank tape, initial head in the first cell
    corner = (cbl == SW_) & (cbr == S_) & (ctl == W_) & (ctr == T)
    init = head_to(tr, ti.q0, "I") & (ti.sym[tr] == ti.blank)
    ok &= ~corner | init
    bottom = (cbl == S_) & (cbr == S_) & (ctl == T) & (ctr == T)
    ok &= ~bottom | (~ti.head[tr] & (ti.sym[tr] == ti.blank))

    # top row: only the halting head, and only in the last column
    top = (cbl == T) & (cbr == T) & (ctl == N_) & (ctr == N_)
    ok &= ~top | (~ti.head[bl] & ~(ti.head[br] & ~ti.halt[br]))
    top_w = (cbl == W_) & (cbr == T) & (ctl == NW_) & (ctr == N_)
    ok &= ~top_w | ~(ti.head[br] & ~ti.halt[br])
    top_e = (cbl == T) & (cbr == E_) & (ctl == N_) & (ctr == NE_)
    ok &= ~top_e | ti.halt[bl]
    return ok


@dataclass
class CompiledTM:
    tm: TMSpec
    alphabet: FTAlphabet
    kernel: RuleKernel
    table: np.ndarray  # flat validity table over (bl, br, tl, tr)
    active: np.ndarray  # (size, 4) active sides: north, east, south, west

    def valid_2x2(self) -> set[tuple[str, str, str, str]]:
        """Valid windows as label tuples ``(bottom-left, bottom-right, top-left, top-right)``."""
        q = self.alphabet.size
        idx = np.flatnonzero(self.table)
        labs = self.alphabet.labels
        out = set()
        for f in idx:
            f = int(f)
            out.add((labs[f // q**3], labs[f // q**2 % q], labs[f // q % q], labs[f % q]))
        return out

    def encode_labels(self, grid) -> np.ndarray:
        """State indices for a grid of labels given top row first."""
        rows = [[self.alphabet.index(c) for c in row] for row in grid]
        return np.array(rows[::-1], dtype=np.uint8)

    def summary(self) -> dict:
        return {
            "states": self.alphabet.size,
            "tiles": len(self.alphabet.tiles),
            "valid_windows": int(self.table.sum()),
            "labels": list(self.alphabet.labels),
        }


def _ft_apply(x: np.ndarray, table: np.ndarray, active: np.ndarray, q: int, m: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    h, w = x.shape[-2:]
    flat = ((x[..., :-1, :-1] * q + x[..., :-1, 1:]) * q + x[..., 1:, :-1]) * q + x[..., 1:, 1:]
    bad = ~table[flat]  # window with lower-left corner (i, j), shape (h-1, w-1)
    c = x[..., 1:-1, 1:-1]
    inv = bad[..., 1:, 1:] | bad[..., 1:, :-1] | bad[..., :-1, 1:] | bad[..., :-1, :-1]
    act = active[c]
    north = x[..., 2:, 1:-1] == m
    east = x[..., 1:-1, 2:] == m
    south = x[..., :-2, 1:-1] == m
    west = x[..., 1:-1, :-2] == m
    hit = (act[..., 0] & north) | (act[..., 1] & east) | (act[..., 2] & south) | (act[..., 3] & west)
    return np.where(inv | hit, m, c).astype(np.uint8)


def compile_tm(tm: TMSpec, normalized: bool = True) -> CompiledTM:
    """Alphabet, radius-1 kernel and window table of ``F_T``.

    ``normalized`` applies :func:`normalize` first, which the frame layout
    needs so that the halting head sits in the top-right interior cell.
    """
    if normalized:
        tm = normalize(tm)
    alpha = _build_alphabet(tm)
    q = alpha.size
    if q > 256:
        raise ValueError(f"{q} states exceed the 8-bit cell limit")
    ti = _TileTable(tm, alpha)
    ids = np.arange(q)
    table = np.empty(q**4, dtype=bool)
    for a in range(q):
        slab = _window_valid(ti, np.int64(a), ids[:, None, None], ids[None, :, None], ids[None, None, :])
        table[a * q**3 : (a + 1) * q**3] = slab.ravel()
    active = np.array([_active_mask(lab) for lab in alpha.labels], dtype=bool)
    m = alpha.m
    kernel = RuleKernel(
        name="tmca-F",
        radius=1,
        apply_valid=lambda x: _ft_apply(x, table, active, q, m),
        states=q,
        maximal=m,
        labels=alpha.labels,
    )
    return CompiledTM(tm, alpha, kernel, table, active)


# -- obstacle ------------------------------------------------------------------


def frame_pattern(ct: CompiledTM, run: Run) -> np.ndarray:
    """Frame around the space-time diagram of ``run`` with a one-cell ``M`` border."""
    a = ct.alphabet
    width, height = run.width, len(run.rows)
    grid = np.full((height + 4, width + 4), a.m, dtype=np.uint8)
    di = a.dir_index
    grid[1, 1], grid[1, width + 2] = di("SW"), di("SE")
    grid[height + 2, 1], grid[height + 2, width + 2] = di("NW"), di("NE")
    grid[1, 2 : width + 2] = di("S")
    grid[height + 2, 2 : width + 2] = di("N")
    grid[2 : height + 2, 1] = di("W")
    grid[2 : height + 2, width + 2] = di("E")
    for t, (tape, head, state, arrival) in enumerate(run.rows):
        for j in range(width):
            s = tape[j] if j < len(tape) else ct.tm.blank
            tile = (s, state, arrival) if j == head else (s, None, None)
            grid[t + 2, j + 2] = a.labels.index(tile_label(tile))
    return grid


def verify_fixed(ct: CompiledTM, pattern: np.ndarray, steps: int = 50, contexts: int = 20,
                 seed: int = 0, margin: int = 3) -> bool:
    """Whether ``pattern`` stays put for ``steps`` steps inside random surroundings."""
    g = np.random.default_rng(seed)
    ph, pw = pattern.shape
    for _ in range(contexts):
        cells = g.integers(0, ct.alphabet.size, size=(ph + 2 * margin, pw + 2 * margin), dtype=np.uint8)
        cells[margin : margin + ph, margin : margin + pw] = pattern
        x = cells
        for _ in range(steps):
            x = ct.kernel.apply_valid(pad(x, 1, Boundary.ONE, ct.alphabet.m))
            if not np.array_equal(x[margin : margin + ph, margin : margin + pw], pattern):
                return False
    return True


def halting_obstacle(tm: TMSpec, step_budget: int = 10_000, verify: bool = True,
                     seed: int = 0) -> tuple[CompiledTM, np.ndarray]:
    """Finite pattern that ``F_T`` never changes, whatever surrounds it."""
    ct = compile_tm(tm)
    run = simulate(ct.tm, step_budget)
    if not run.halted:
        raise BudgetExceeded(f"no halt within {step_budget} steps")
    pattern = frame_pattern(ct, run)
    if verify and not verify_fixed(ct, pattern, seed=seed):
        raise RuntimeError("halting frame is not fixed; the window table is inconsistent")
    return ct, pattern


def looper_window(ct: CompiledTM, side: int, g: np.random.Generator) -> np.ndarray:
    """Random ``side x side`` window with an ``M`` border.

    Crops the frame drawn around a truncated run (the best finite attempt at
    a frame for a machine that does not halt in time), at a random offset,
    with a few random cells overwritten.
    """
    run = simulate(ct.tm, int(g.integers(side // 2, 2 * side)))
    frame = frame_pattern(ct, run)
    big = g.integers(0, ct.alphabet.size, size=(frame.shape[0] + side, frame.shape[1] + side), dtype=np.uint8)
    oy, ox = int(g.integers(0, side // 2)), int(g.integers(0, side // 2))
    big[oy : oy + frame.shape[0], ox : ox + frame.shape[1]] = frame
    y0 = int(g.integers(0, max(1, big.shape[0] - side)))
    x0 = int(g.integers(0, max(1, big.shape[1] - side)))
    w = big[y0 : y0 + side, x0 : x0 + side].copy()
    if w.shape != (side, side):
        w = np.pad(w, ((0, side - w.shape[0]), (0, side - w.shape[1])), constant_values=ct.alphabet.m)
    noise = g.random(w.shape) < 0.01
    w[noise] = g.integers(0, ct.alphabet.size, size=int(noise.sum()))
    w[[0, -1], :] = ct.alphabet.m
    w[:, [0, -1]] = ct.alphabet.m
    return w


def steps_to_all_m(ct: CompiledTM, cells: np.ndarray, limit: int) -> int | None:
    """Steps until every cell is ``M`` with ``M`` outside the window, ``None`` past ``limit``."""
    m = ct.alphabet.m
    x = np.asarray(cells, dtype=np.uint8)
    for t in range(limit + 1):
        if (x == m).all():
            return t
        x = ct.kernel.apply_valid(pad(x, 1, Boundary.ONE, m))
    return None


def pattern_to_json(ct: CompiledTM, grid: np.ndarray) -> dict:
    labs = ct.alphabet.labels
    return {"labels": list(labs), "rows_top_first": [[labs[v] for v in row] for row in grid[::-1]]}


EXAMPLE_HALTING = {
    "states": ["A", "B", "C", "H"],
    "blank": "_",
    "transitions": [
        {"state": "A", "read": "_", "write": "1", "move": "R", "next": "B"},
        {"state": "B", "read": "_", "write": "1", "move": "L", "next": "C"},
        {"state": "C", "read": "1", "write": "1", "move": "R", "next": "H"},
    ],
    "initial": "A",
    "halt": "H",
}

EXAMPLE_LOOPER = {
    "states": ["A", "H"],
    "blank": "_",
    "transitions": [{"state": "A", "read": "_", "write": "1", "move": "R", "next": "A"}],
    "initial": "A",
    "halt": "H",
}
