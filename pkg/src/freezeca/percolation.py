"""Bernoulli sampling, directed paths and Monte Carlo estimators.

Sampling is coupled across densities: a cell is 1 iff its keyed uniform is
below ``p``, so raising ``p`` only ever adds 1s to a given trial.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import bitgrid, rng
from .engine import Boundary, Window, pad
from .rules import RuleKernel

INFINITE = math.inf
Z95 = 1.959963984540054


@dataclass(frozen=True)
class BernoulliSpec:
    p: Fraction | float
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError(f"p={self.p} is not a probability")


def threshold(u: np.ndarray, p) -> np.ndarray:
    return (u < float(p)).astype(np.uint8)


def sample_window(spec: BernoulliSpec, width: int, height: int, trial: int = 0,
                  boundary: Boundary = Boundary.PERIODIC, origin=(0, 0)) -> Window:
    if width < 1 or height < 1:
        raise ValueError("window dimensions must be positive")
    u = rng.uniforms(spec.seed, [trial], width, height, origin)[0]
    return Window(threshold(u, spec.p), boundary, 0, origin)


# -- directed paths ------------------------------------------------------------


def _symbol_grid(cells: np.ndarray, symbol: int) -> np.ndarray:
    return np.asarray(cells) == symbol


def reachable(cells: np.ndarray, symbol: int, origin=(0, 0)) -> np.ndarray:
    """Cells reachable from ``origin`` by ``(0,1)``/``(1,1)`` steps through symbol cells.

    Works on stacks ``(..., H, W)``; ``origin`` is an array index ``(x, y)``.
    """
    s = _symbol_grid(cells, symbol)
    x0, y0 = origin
    out = np.zeros_like(s)
    out[..., y0, x0] = s[..., y0, x0]
    for y in range(y0 + 1, s.shape[-2]):
        prev = out[..., y - 1, :]
        step = prev.copy()
        step[..., 1:] |= prev[..., :-1]
        out[..., y, :] = step & s[..., y, :]
    return out


def directed_crossing(w, symbol: int = 1, origin=(0, 0)) -> np.ndarray | bool:
    """Whether a directed symbol path joins ``origin`` to the top row."""
    cells = w.cells if isinstance(w, Window) else np.asarray(w)
    if isinstance(w, Window):
        origin = w.index_of(origin)[::-1]
    r = reachable(cells, symbol, origin)[..., -1, :].any(axis=-1)
    return bool(r) if r.ndim == 0 else r


def koenig_bound(w, symbol: int = 0, origin=(0, 0)) -> float | int:
    """Number of cells on the longest directed symbol path from ``origin``.

    ``INFINITE`` when some path reaches the top row of the window.
    """
    cells = w.cells if isinstance(w, Window) else np.asarray(w)
    if isinstance(w, Window):
        origin = w.index_of(origin)[::-1]
    s = _symbol_grid(cells, symbol)
    x0, y0 = origin
    if not s[y0, x0]:
        return 0
    if directed_crossing(cells, symbol, origin):
        return INFINITE
    h, wd = s.shape
    longest = np.zeros(wd + 1, dtype=np.int64)
    for y in range(h - 1, y0 - 1, -1):
        nxt = np.maximum(longest[:-1], longest[1:])
        longest = np.append(np.where(s[y], 1 + nxt, 0), 0)
    return int(longest[x0])


# -- estimators ----------------------------------------------------------------


def wilson(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    phat = k / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class ScanRow:
    p: float
    trials: int
    estimate: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_count(cls, p, hits: int, trials: int) -> "ScanRow":
        lo, hi = wilson(hits, trials)
        est = hits / trials
        return cls(float(p), trials, est, min(lo, est), max(hi, est))


@dataclass
class ScanResult:
    rows: list[ScanRow]
    metadata: dict = field(default_factory=dict)

    def estimates(self) -> np.ndarray:
        return np.array([r.estimate for r in self.rows])

    def to_csv(self) -> str:
        lines = ["p,trials,estimate,ci_low,ci_high"]
        for r in self.rows:
            lines.append(f"{r.p!r},{r.trials},{r.estimate!r},{r.ci_low!r},{r.ci_high!r}")
        return "\n".join(lines) + "\n"


def _batches(trials: int, batch: int) -> list[range]:
    return [range(s, min(trials, s + batch)) for s in range(0, trials, batch)]


def survival_estimate(symbol: int, p, width: int, height: int, trials: int, seed: int = 0,
                      batch: int = 4096) -> ScanRow:
    """Frequency of a directed symbol crossing from the bottom-left cell."""
    if trials < 1:
        raise ValueError("trials must be positive")
    hits = 0
    for b in _batches(trials, batch):
        u = rng.uniforms(seed, b, width, height)
        hits += int(directed_crossing(threshold(u, p), symbol).sum())
    return ScanRow.from_count(p, hits, trials)


def survival_curve(symbol: int, p_grid, width: int, height: int, trials: int, seed: int = 0,
                   batch: int = 4096) -> ScanResult:
    """Coupled version of :func:`survival_estimate` over a density grid."""
    hits = np.zeros(len(p_grid), dtype=np.int64)
    for b in _batches(trials, batch):
        u = rng.uniforms(seed, b, width, height)
        for i, p in enumerate(p_grid):
            hits[i] += int(directed_crossing(threshold(u, p), symbol).sum())
    return ScanResult([ScanRow.from_count(p, int(h), trials) for p, h in zip(p_grid, hits)])


def central_square(width: int, height: int, side: int) -> tuple[slice, slice]:
    side = min(side, width, height)
    y0, x0 = (height - side) // 2, (width - side) // 2
    return slice(y0, y0 + side), slice(x0, x0 + side)


def evolve_batch(cells: np.ndarray, k: RuleKernel, horizon: int,
                 boundary: Boundary = Boundary.PERIODIC) -> np.ndarray:
    """Run a stack of windows ``(T, H, W)`` for up to ``horizon`` steps."""
    if k.binary and k.family is not None:
        sh = bitgrid.Shifter(cells.shape[-1], boundary.value)
        sets = [sorted(s) for s in k.family.sets]
        words = bitgrid.pack(cells)
        for _ in range(horizon):
            new = bitgrid.step_family(words, sets, sh)
            if np.array_equal(new, words):
                break
            words = new
        return bitgrid.unpack(words, cells.shape[-1])
    x = np.asarray(cells, dtype=np.uint8)
    for _ in range(horizon):
        new = k.apply_valid(pad(x, k.radius, boundary, k.maximal)).astype(np.uint8)
        if np.array_equal(new, x):
            break
        x = new
    return x


def fixation_scan(k: RuleKernel, p_grid, width: int, height: int, horizon: int, trials: int,
                  seed: int = 0, threads: int = 1, batch: int = 50) -> ScanResult:
    """Fraction of periodic trials whose central square is all maximal at ``horizon``.

    Trials are keyed by index, so the result does not depend on ``threads``
    or ``batch``.
    """
    side = max(k.radius, width // 8)
    rows_sl, cols_sl = central_square(width, height, side)
    jobs = [(i, b) for i in range(len(p_grid)) for b in _batches(trials, batch)]

    def run(job):
        i, b = job
        u = rng.uniforms(seed, b, width, height)
        final = evolve_batch(threshold(u, p_grid[i]), k, horizon)
        return i, int((final[:, rows_sl, cols_sl] == k.maximal).all(axis=(1, 2)).sum())

    hits = np.zeros(len(p_grid), dtype=np.int64)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    for i, h in results:
        hits[i] += h
    meta = {
        "rule": k.name,
        "width": width,
        "height": height,
        "horizon": horizon,
        "trials": trials,
        "boundary": Boundary.PERIODIC.value,
        "seed": seed,
        "central_square": min(side, width, height),
        "caveats": [
            "finite torus: paths may wrap around, so long-range blocking differs from the plane",
            "finite horizon: a trial counted as unfixed might fix later",
            "estimates are proxies for trivialization, not decisions of it",
        ],
    }
    return ScanResult([ScanRow.from_count(p, int(h), trials) for p, h in zip(p_grid, hits)], meta)


def crossover(result: ScanResult, level: float = 0.5) -> float | None:
    """Linearly interpolated density where the estimate first reaches ``level``."""
    ps = [r.p for r in result.rows]
    es = result.estimates()
    for i in range(len(ps)):
        if es[i] >= level:
            if i == 0:
                return ps[0]
            p0, p1, e0, e1 = ps[i - 1], ps[i], es[i - 1], es[i]
            return p0 + (level - e0) * (p1 - p0) / (e1 - e0)
    return None


# -- dependence and concentration ------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """Coarse field whose cell ``a`` reads the fine cells ``block * a + [lo, hi]`` on each axis."""

    block: int = 1
    lo: tuple[int, int] = (0, 0)
    hi: tuple[int, int] = (0, 0)

    @classmethod
    def square(cls, r: int) -> "FieldSpec":
        return cls(1, (-r, -r), (r, r))


def dependence_radius(spec: FieldSpec) -> int:
    """Least ``k`` such that cells more than ``k`` apart read disjoint regions."""
    ks = [-(-(h - l + 1) // spec.block) - 1 for l, h in zip(spec.lo, spec.hi)]
    return max(0, *ks)


def hoeffding_bound(n: int, epsilon) -> float:
    if n < 1:
        raise ValueError("n must be at least 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return 2.0 * math.exp(-2.0 * float(epsilon) ** 2 * n)


def deviation_frequency(n: int, epsilon, p: float = 0.5, trials: int = 100_000, seed: int = 0) -> float:
    """Fraction of ``trials`` sample means of ``n`` Bernoulli(p) draws outside ``[p-eps, p+eps]``."""
    g = np.random.default_rng(seed)
    counts = g.binomial(n, float(p), size=trials)
    centre, lim = n * Fraction(str(p)), n * Fraction(str(epsilon))
    outside = np.array([abs(k - centre) > lim for k in range(n + 1)])
    return float(outside[counts].mean())
