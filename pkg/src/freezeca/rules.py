"""Rule representations.

A binary freezing monotone rule is described by its neighbor family: an
antichain of origin-free neighbor sets, the rule turning a 0 into a 1 exactly
when some set is fully occupied by 1s.  :class:`RuleKernel` is the uniform
interface the engine steps, for any finite alphabet.

Arrays use ``a[y, x]`` indexing with ``y`` increasing upwards.  A patch of a
radius-``r`` kernel is a ``(2r+1, 2r+1)`` array whose center is the cell
being updated; offset ``(dx, dy)`` sits at ``patch[r + dy, r + dx]``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import (
    EmptySetMeansConstant,
    NotMonotoneFreezing,
    OriginInNeighborSet,
    RadiusTooLarge,
)
from .geometry import Vec, convex_hull, hull_contains_origin

NeighborSet = frozenset  # frozenset[Vec]


def _key(s: frozenset) -> tuple:
    return (len(s), sorted(s))


@dataclass(frozen=True)
class NeighborFamily:
    """Antichain of origin-free neighbor sets; build it with :func:`canonicalize_family`."""

    sets: tuple[frozenset, ...]

    def __iter__(self):
        return iter(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    @property
    def radius(self) -> int:
        return max((max(abs(x), abs(y)) for s in self.sets for x, y in s), default=0)

    @property
    def cells(self) -> frozenset:
        return frozenset(c for s in self.sets for c in s)

    def negated(self) -> "NeighborFamily":
        return canonicalize_family([{(-x, -y) for x, y in s} for s in self.sets])

    def to_json(self) -> dict:
        return {"neighbor_sets": [[list(c) for c in sorted(s)] for s in self.sets]}

    @classmethod
    def from_json(cls, data: Mapping) -> "NeighborFamily":
        return canonicalize_family(
            [{(int(c[0]), int(c[1])) for c in s} for s in data["neighbor_sets"]]
        )


def canonicalize_family(raw: Iterable[Iterable[Vec]]) -> NeighborFamily:
    """Drop supersets so the family is an antichain; result is order independent."""
    sets = set()
    for s in raw:
        fs = frozenset((int(x), int(y)) for x, y in s)
        if not fs:
            raise EmptySetMeansConstant("an empty neighbor set makes the rule constantly 1")
        if (0, 0) in fs:
            raise OriginInNeighborSet(f"neighbor set {sorted(fs)} contains the origin")
        sets.add(fs)
    minimal = [s for s in sets if not any(t < s for t in sets)]
    return NeighborFamily(tuple(sorted(minimal, key=_key)))


@dataclass(frozen=True)
class FGSplit:
    f_sets: tuple[frozenset, ...]
    g_sets: tuple[frozenset, ...]


def split_fg(e: NeighborFamily) -> FGSplit:
    """Separate sets whose convex hull avoids the origin from those whose hull contains it."""
    f, g = [], []
    for s in e.sets:
        (g if hull_contains_origin(convex_hull(s)) else f).append(s)
    return FGSplit(tuple(f), tuple(g))


@dataclass(frozen=True, eq=False)
class RuleKernel:
    """Local rule of a cellular automaton over the states ``0 .. states-1``.

    ``apply_valid`` maps an array of shape ``(..., H, W)`` to the rule's
    output on the cells whose whole patch is present, shape
    ``(..., H - 2r, W - 2r)``.  Every other entry point is derived from it.
    ``maximal`` is the top state; the order is flat below it, which for two
    states is the usual ``0 < 1``.
    """

    name: str
    radius: int
    apply_valid: Callable[[np.ndarray], np.ndarray]
    states: int = 2
    maximal: int = 1
    labels: tuple[str, ...] | None = None
    family: NeighborFamily | None = None
    params: dict = field(default_factory=dict)

    @property
    def binary(self) -> bool:
        return self.states == 2

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    def local(self, patch) -> int:
        patch = np.asarray(patch, dtype=np.uint8)
        return int(self.apply_valid(patch[None])[0, 0, 0])

    def batch(self, patches: np.ndarray) -> np.ndarray:
        """Outputs for a stack of patches of shape ``(B, 2r+1, 2r+1)``."""
        return self.apply_valid(np.asarray(patches, dtype=np.uint8))[:, 0, 0]

    def leq(self, a, b):
        """Flat order with ``maximal`` on top (elementwise on arrays)."""
        return (a == b) | (b == self.maximal)


def _shifted(x: np.ndarray, r: int, dx: int, dy: int) -> np.ndarray:
    h, w = x.shape[-2:]
    return x[..., r + dy : h - r + dy, r + dx : w - r + dx]


def family_apply(e: NeighborFamily, r: int):
    sets = [sorted(s) for s in e.sets]

    def apply_valid(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=bool)
        out = _shifted(x, r, 0, 0).copy()
        for s in sets:
            acc = _shifted(x, r, *s[0]).copy()
            for c in s[1:]:
                acc &= _shifted(x, r, *c)
            out |= acc
        return out.astype(np.uint8)

    return apply_valid


def rule_from_family(e: NeighborFamily, radius: int | None = None, name: str | None = None) -> RuleKernel:
    r = e.radius if radius is None else radius
    if r < e.radius:
        raise ValueError("radius smaller than the family's reach")
    return RuleKernel(
        name=name or "family",
        radius=r,
        apply_valid=family_apply(e, r),
        family=e,
    )


def patch_offsets(radius: int) -> list[Vec]:
    """Offsets in bit order: bit ``(dy + r) * (2r + 1) + (dx + r)``."""
    return [(dx, dy) for dy in range(-radius, radius + 1) for dx in range(-radius, radius + 1)]


def decode_patches(codes: np.ndarray, radius: int) -> np.ndarray:
    """Binary patches for integer codes, one bit per cell."""
    side = 2 * radius + 1
    codes = np.asarray(codes, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(side * side, dtype=np.int64)) & 1
    return bits.reshape(-1, side, side).astype(np.uint8)


def table_kernel(table, radius: int, name: str = "table") -> RuleKernel:
    """Binary kernel given by an explicit output table indexed by patch code."""
    side = 2 * radius + 1
    table = np.asarray(table, dtype=np.uint8)
    if table.shape != (1 << (side * side),):
        raise ValueError("table size does not match radius")
    weights = (1 << np.arange(side * side, dtype=np.int64)).reshape(side, side)

    def apply_valid(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        h, w = x.shape[-2:]
        code = np.zeros(x.shape[:-2] + (h - 2 * radius, w - 2 * radius), dtype=np.int64)
        for i in range(side):
            for j in range(side):
                code += x[..., i : h - 2 * radius + i, j : w - 2 * radius + j] * weights[i, j]
        return table[code]

    return RuleKernel(name=name, radius=radius, apply_valid=apply_valid)


def function_kernel(fn: Callable[[np.ndarray], int], radius: int, name: str = "function") -> RuleKernel:
    """Tabulate a binary per-patch function (small radii only)."""
    side = 2 * radius + 1
    if side * side > 20:
        raise RadiusTooLarge("tabulation limited to 20 cells")
    patches = decode_patches(np.arange(1 << (side * side)), radius)
    return table_kernel([fn(p) for p in patches], radius, name)


# -- validation --------------------------------------------------------------

EXHAUSTIVE_LIMIT = 1 << 25


@dataclass
class CheckResult:
    ok: bool
    witness: object = None
    trials: int = 0
    exhaustive: bool = False

    def __bool__(self) -> bool:
        return self.ok


def _patch_count(k: RuleKernel) -> int:
    return k.states ** (k.side * k.side)


def _all_patches(k: RuleKernel, start: int, stop: int) -> np.ndarray:
    side = k.side
    codes = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((len(codes), side * side), dtype=np.uint8)
    for i in range(side * side):
        digits[:, i] = codes % k.states
        codes = codes // k.states
    return digits.reshape(-1, side, side)


def is_freezing(k: RuleKernel, mode: str = "exhaustive", trials: int = 10_000, seed: int = 0,
                chunk: int = 1 << 16) -> CheckResult:
    """Check that no patch moves the center state down.

    ``mode="exhaustive"`` enumerates every patch (at most 2**25 of them);
    ``mode="randomized"`` draws ``trials`` uniform patches.
    """
    c = k.radius
    if mode == "exhaustive":
        total = _patch_count(k)
        if total > EXHAUSTIVE_LIMIT:
            raise RadiusTooLarge(f"{total} patches exceed the exhaustive limit")
        for start in range(0, total, chunk):
            p = _all_patches(k, start, min(total, start + chunk))
            bad = ~k.leq(p[:, c, c], k.batch(p))
            if bad.any():
                return CheckResult(False, p[np.argmax(bad)], total, True)
        return CheckResult(True, None, total, True)
    rng = np.random.default_rng(seed)
    done = 0
    while done < trials:
        n = min(chunk, trials - done, 4096)
        p = _random_patches(k, rng, n)
        bad = ~k.leq(p[:, c, c], k.batch(p))
        if bad.any():
            return CheckResult(False, p[np.argmax(bad)], done + n, False)
        done += n
    return CheckResult(True, None, done, False)


def _random_patches(k: RuleKernel, rng: np.random.Generator, n: int) -> np.ndarray:
    side = k.side
    if k.binary:
        dens = rng.random((n, 1, 1))
        return (rng.random((n, side, side)) < dens).astype(np.uint8)
    return rng.integers(0, k.states, size=(n, side, side), dtype=np.uint8)


def is_monotone(k: RuleKernel, mode: str = "exhaustive", trials: int = 10_000, seed: int = 0) -> CheckResult:
    """Check ``x <= y  =>  f(x) <= f(y)`` for a binary kernel.

    Exhaustive mode compares every patch with each single-cell raise of it;
    randomized mode compares random patches with single- and multi-cell
    raises.  A failing result carries the witness pair ``(x, y)``.
    """
    if not k.binary:
        raise ValueError("monotonicity check is defined for binary kernels")
    side = k.side
    ncell = side * side
    if mode == "exhaustive":
        total = 1 << ncell
        if total > EXHAUSTIVE_LIMIT:
            raise RadiusTooLarge(f"{total} patches exceed the exhaustive limit")
        out = np.empty(total, dtype=np.uint8)
        step = 1 << 16
        for start in range(0, total, step):
            stop = min(total, start + step)
            out[start:stop] = k.batch(decode_patches(np.arange(start, stop), k.radius))
        idx = np.arange(total, dtype=np.int64)
        for b in range(ncell):
            lo = idx[(idx >> b) & 1 == 0]
            bad = out[lo] > out[lo | (1 << b)]
            if bad.any():
                i = lo[np.argmax(bad)]
                x = decode_patches(np.array([i]), k.radius)[0]
                y = decode_patches(np.array([i | (1 << b)]), k.radius)[0]
                return CheckResult(False, (x, y), total, True)
        return CheckResult(True, None, total, True)
    rng = np.random.default_rng(seed)
    done = 0
    while done < trials:
        n = min(2048, trials - done)
        x = _random_patches(k, rng, n)
        y = x.copy()
        flat = y.reshape(n, -1)
        # half the pairs differ in one cell, the rest in a random superset
        single = rng.integers(0, ncell, size=n)
        flat[np.arange(n), single] = 1
        extra = rng.random((n, ncell)) < rng.random((n, 1)) * 0.2
        extra[: n // 2] = False
        flat |= extra.astype(np.uint8)
        bad = k.batch(x) > k.batch(y)
        if bad.any():
            i = int(np.argmax(bad))
            return CheckResult(False, (x[i], y[i]), done + n, False)
        done += n
    return CheckResult(True, None, done, False)


# -- rule -> family ----------------------------------------------------------


def _minimal_transversals(sets: list[frozenset]) -> list[frozenset]:
    """Minimal hitting sets of a family (Berge's incremental algorithm)."""
    trans = [frozenset()]
    for s in sets:
        nxt = set()
        for t in trans:
            if t & s:
                nxt.add(t)
            else:
                for e in s:
                    nxt.add(t | {e})
        trans = [t for t in nxt if not any(u < t for u in nxt)]
    return trans


def family_from_rule(k: RuleKernel, validate: str | None = None, seed: int = 0) -> NeighborFamily:
    """Recover the neighbor family of a binary freezing monotone kernel.

    Minimal growth sets are found by incremental dualization: given the sets
    found so far, the complement of each minimal transversal is the largest
    candidate avoiding all of them; a positive candidate is shrunk greedily
    to a new minimal set, and the search stops once every candidate is
    negative.  Validation is exhaustive up to radius 1 and randomized at
    radius 2 unless ``validate`` says otherwise.
    """
    if not k.binary:
        raise NotMonotoneFreezing("only binary kernels have a neighbor family")
    if k.radius > 2:
        raise RadiusTooLarge("family extraction is limited to radius 2")
    if validate is None:
        validate = "exhaustive" if k.radius <= 1 else "randomized"
    if not is_freezing(k, validate, seed=seed) or not is_monotone(k, validate, seed=seed):
        raise NotMonotoneFreezing(f"kernel {k.name!r} is not freezing and monotone")
    r = k.radius
    cells = frozenset(c for c in patch_offsets(r) if c != (0, 0))
    cache: dict[frozenset, bool] = {}

    def fires(s: frozenset) -> bool:
        if s not in cache:
            p = np.zeros((2 * r + 1, 2 * r + 1), dtype=np.uint8)
            for dx, dy in s:
                p[r + dy, r + dx] = 1
            cache[s] = bool(k.local(p))
        return cache[s]

    def shrink(s: frozenset) -> frozenset:
        for c in sorted(s):
            if fires(s - {c}):
                s = s - {c}
        return s

    found: list[frozenset] = []
    while True:
        for t in sorted(_minimal_transversals(found), key=_key):
            cand = cells - t
            if fires(cand):
                found.append(shrink(cand))
                break
        else:
            break
    if not found:
        return NeighborFamily(())
    return canonicalize_family(found)


def von_neumann_families() -> list[NeighborFamily]:
    """Every antichain of nonempty subsets of the four nearest neighbors."""
    vn = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    subsets = [frozenset(c) for n in range(1, 5) for c in itertools.combinations(vn, n)]
    out = []
    for mask in range(1 << len(subsets)):
        chosen = [subsets[i] for i in range(len(subsets)) if mask >> i & 1]
        if any(a < b for a in chosen for b in chosen):
            continue
        out.append(NeighborFamily(tuple(sorted(chosen, key=_key))))
    return out
