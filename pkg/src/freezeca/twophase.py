"""Freezing automaton with two density-dependent phases, ``f = h o g``.

``g'`` flags cells whose neighborhood has a 1-density close to ``eps1`` and
no ``N x N`` block of 1s nearby; ``g`` fills every ``N x N`` square flagged
entirely by ``g'``; ``h`` is a block version of the up/up-right growth rule.
All kernels work in valid mode on box sums, so a window of side ``s`` maps
to one of side ``s - 2r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import rng
from .errors import ExactnessViolated
from .engine import Window
from .percolation import FieldSpec, hoeffding_bound, koenig_bound, reachable, threshold
from .rules import RuleKernel


@dataclass(frozen=True)
class TwoPhaseParams:
    n_block: int = 4
    eps1: Fraction = Fraction(1, 4)
    eps2: Fraction = Fraction(1, 2)
    delta: Fraction = Fraction(1, 8)

    def __post_init__(self):
        for name in ("eps1", "eps2", "delta"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.n_block < 1:
            raise ValueError("n_block must be positive")
        if not (0 < self.delta < self.eps1 < self.eps2 - self.delta and self.eps2 < 1):
            raise ValueError("need 0 < delta < eps1 < eps2 - delta and eps2 < 1")

    @property
    def radius_gprime(self) -> int:
        return 4 * self.n_block

    @property
    def radius_g(self) -> int:
        return 5 * self.n_block - 1

    @property
    def radius_h(self) -> int:
        return 2 * self.n_block - 1

    @property
    def radius_f(self) -> int:
        return self.radius_g + self.radius_h

    def to_json(self) -> dict:
        return {"n_block": self.n_block, "eps1": str(self.eps1), "eps2": str(self.eps2),
                "delta": str(self.delta)}


def box_sum(a: np.ndarray, hy: int, hx: int | None = None) -> np.ndarray:
    """Sums over every ``hy x hx`` box fully inside ``a``, indexed by the box's lower corner."""
    hx = hy if hx is None else hx
    a = np.asarray(a, dtype=np.int32)
    c = np.zeros(a.shape[:-2] + (a.shape[-2] + 1, a.shape[-1] + 1), dtype=np.int32)
    c[..., 1:, 1:] = a.cumsum(-2).cumsum(-1)
    return c[..., hy:, hx:] - c[..., :-hy, hx:] - c[..., hy:, :-hx] + c[..., :-hy, :-hx]


def _gprime(x: np.ndarray, p: TwoPhaseParams) -> np.ndarray:
    n = p.n_block
    h, w = x.shape[-2:]
    oh, ow = h - 8 * n, w - 8 * n
    full = box_sum(x, n) == n * n
    blocked = box_sum(full, 7 * n + 1)[..., :oh, :ow] > 0
    count = box_sum(x, 2 * n + 1)[..., 3 * n : 3 * n + oh, 3 * n : 3 * n + ow]
    area = (2 * n + 1) ** 2
    lo, hi = (p.eps1 - p.delta) * area, (p.eps1 + p.delta) * area
    # exact comparisons against the rational bounds
    above = count * lo.denominator > lo.numerator
    below = count * hi.denominator < hi.numerator
    return (~blocked & above & below).astype(np.uint8)


def _g(x: np.ndarray, p: TwoPhaseParams) -> np.ndarray:
    n = p.n_block
    r = p.radius_g
    gp = _gprime(x, p)
    flagged = box_sum(gp, n) == n * n
    grow = box_sum(flagged, n) > 0
    center = x[..., r : x.shape[-2] - r, r : x.shape[-1] - r]
    return (center.astype(bool) | grow).astype(np.uint8)


def _h(x: np.ndarray, p: TwoPhaseParams) -> np.ndarray:
    n = p.n_block
    r = p.radius_h
    h, w = x.shape[-2:]
    oh, ow = h - 2 * r, w - 2 * r
    rect = box_sum(x, n, 2 * n) == 2 * n * n
    grow = box_sum(rect, n)[..., 2 * n : 2 * n + oh, n : n + ow] > 0
    center = x[..., r : h - r, r : w - r]
    return (center.astype(bool) | grow).astype(np.uint8)


def gprime_kernel(p: TwoPhaseParams = TwoPhaseParams()) -> RuleKernel:
    return RuleKernel("twophase-gprime", p.radius_gprime, lambda x: _gprime(x, p), params=p.to_json())


def g_kernel(p: TwoPhaseParams = TwoPhaseParams()) -> RuleKernel:
    return RuleKernel("twophase-g", p.radius_g, lambda x: _g(x, p), params=p.to_json())


def h_kernel(p: TwoPhaseParams = TwoPhaseParams()) -> RuleKernel:
    return RuleKernel("twophase-h", p.radius_h, lambda x: _h(x, p), params=p.to_json())


def f_kernel(p: TwoPhaseParams = TwoPhaseParams()) -> RuleKernel:
    return RuleKernel("twophase-f", p.radius_f, lambda x: _h(_g(x, p), p), params=p.to_json())


# -- coarse fields -------------------------------------------------------------


def _g_on_window(w: Window, p: TwoPhaseParams) -> tuple[np.ndarray, tuple[int, int]]:
    r = p.radius_g + w.exact_margin
    cells = w.cells[w.exact_margin : w.height - w.exact_margin, w.exact_margin : w.width - w.exact_margin]
    if min(cells.shape) <= 2 * p.radius_g:
        raise ExactnessViolated("window too small for an exact evaluation of g")
    return _g(cells, p), (w.offset[0] + r, w.offset[1] + r)


def _coarse(values: np.ndarray, origin: tuple[int, int], n: int) -> Window:
    """Sample ``values`` (lower-left at absolute ``origin``) at multiples of ``n``."""
    jx = (-origin[0]) % n
    jy = (-origin[1]) % n
    sub = values[jy::n, jx::n]
    if sub.size == 0:
        raise ExactnessViolated("no coarse cell lies in the exact region")
    a0 = (origin[0] + jx) // n
    b0 = (origin[1] + jy) // n
    return Window(sub, "zero", 0, (a0, b0))


def field_A_spec(p: TwoPhaseParams = TwoPhaseParams()) -> FieldSpec:
    """Fine cells read by ``A(a, b)``: the exact reach of ``g`` around ``(aN, bN)``."""
    n = p.n_block
    return FieldSpec(n, (-5 * n + 1,) * 2, (5 * n - 2,) * 2)


def field_B_spec(p: TwoPhaseParams = TwoPhaseParams()) -> FieldSpec:
    n = p.n_block
    return FieldSpec(n, (-5 * n + 1,) * 2, (6 * n - 3,) * 2)


def coarse_field_A(w: Window, p: TwoPhaseParams = TwoPhaseParams()) -> Window:
    """``A(a, b) = 1`` iff ``g(x)`` is 0 at ``(aN, bN)``."""
    gx, org = _g_on_window(w, p)
    return _coarse((gx == 0).astype(np.uint8), org, p.n_block)


def coarse_field_B(w: Window, p: TwoPhaseParams = TwoPhaseParams()) -> Window:
    """``B(a, b) = 1`` iff ``g(x)`` is all 1 on the block with lower corner ``(aN, bN)``."""
    gx, org = _g_on_window(w, p)
    n = p.n_block
    full = (box_sum(gx, n) == n * n).astype(np.uint8)
    return _coarse(full, org, n)


# -- structural checks ---------------------------------------------------------


@dataclass
class IdempotenceReport:
    samples: int = 0
    comparisons: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def _samples(seed: int, trials: range, side: int, p: float) -> np.ndarray:
    return threshold(rng.uniforms(seed, trials, side, side), p)


def verify_idempotence(params: TwoPhaseParams = TwoPhaseParams(), trials: int = 1000,
                       side: int = 160, horizon: int = 4, densities=(0.1, 0.5, 0.9),
                       seed: int = 0, batch: int = 50) -> IdempotenceReport:
    """Check ``g(h^n(g(x))) = h^n(g(x))`` on the exact interior for ``n <= horizon``.

    ``trials`` samples are split evenly over ``densities``.
    """
    rg, rh = params.radius_g, params.radius_h
    if side <= 4 * rg + 2 * horizon * rh:
        raise ExactnessViolated("window too small for the requested horizon")
    rep = IdempotenceReport()
    per = [trials // len(densities) + (i < trials % len(densities)) for i in range(len(densities))]
    for di, (dens, count) in enumerate(zip(densities, per)):
        for start in range(0, count, batch):
            ids = range(start, min(count, start + batch))
            x = _samples(seed + 7919 * di, ids, side, dens)
            y = _g(x, params)
            for n in range(horizon + 1):
                lhs = _g(y, params)
                rhs = y[..., rg:-rg, rg:-rg]
                rep.comparisons += lhs.size
                bad = np.argwhere(lhs != rhs)
                for t, i, j in bad[:5]:
                    rep.counterexamples.append({"density": dens, "sample": ids[t], "n": n,
                                                "cell": (int(j), int(i))})
                y = _h(y, params)
            rep.samples += len(ids)
    return rep


def verify_composition(params: TwoPhaseParams = TwoPhaseParams(), trials: int = 60,
                       side: int = 224, n_max: int = 4, densities=(0.1, 0.5, 0.9),
                       seed: int = 1) -> IdempotenceReport:
    """Check ``f^n = h^n o g`` directly on the exact interior for ``1 <= n <= n_max``."""
    rf, rg, rh = params.radius_f, params.radius_g, params.radius_h
    if side <= 2 * n_max * rf:
        raise ExactnessViolated("window too small for the requested n")
    rep = IdempotenceReport()
    per = [trials // len(densities) + (i < trials % len(densities)) for i in range(len(densities))]
    for di, (dens, count) in enumerate(zip(densities, per)):
        x = _samples(seed + 104729 * di, range(count), side, dens)
        fx = x
        hg = _g(x, params)
        for n in range(1, n_max + 1):
            fx = _h(_g(fx, params), params)
            hg = _h(hg, params)
            # f^n shrinks by n*rf per side; h^n o g by rg + n*rh
            cut = n * rf - (rg + n * rh)
            rhs = hg[..., cut : hg.shape[-2] - cut, cut : hg.shape[-1] - cut]
            rep.comparisons += fx.size
            for t, i, j in np.argwhere(fx != rhs)[:5]:
                rep.counterexamples.append({"density": dens, "sample": int(t), "n": n,
                                            "cell": (int(j), int(i))})
        rep.samples += count
    return rep


def longest_path(cells: np.ndarray, symbol: int, origin=(0, 0)) -> int:
    """Cells on the longest directed symbol path from ``origin`` inside the array."""
    s = np.asarray(cells) == symbol
    x0, y0 = origin
    if not s[y0, x0]:
        return 0
    longest = np.zeros(s.shape[1] + 1, dtype=np.int64)
    for y in range(s.shape[0] - 1, y0 - 1, -1):
        nxt = np.maximum(longest[:-1], longest[1:])
        longest = np.append(np.where(s[y], 1 + nxt, 0), 0)
    return int(longest[x0])


@dataclass
class PathReport:
    checked_a: int = 0
    checked_b: int = 0
    inconclusive: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def origin_trajectory(x: Window, params: TwoPhaseParams, steps: int) -> list[int]:
    """States of the cell ``(0, 0)`` under ``f^t`` for ``t = 0..steps``, exactly."""
    i, j = x.index_of((0, 0))
    rf = params.radius_f
    if min(i, j, x.height - 1 - i, x.width - 1 - j) < steps * rf:
        raise ExactnessViolated("origin leaves the exact region")
    out = [int(x.cells[i, j])]
    y = x.cells
    for t in range(1, steps + 1):
        y = _h(_g(y, params), params)
        out.append(int(y[i - t * rf, j - t * rf]))
    return out


def check_path_claims_on(x: Window, params: TwoPhaseParams, steps: int, rep: PathReport,
                         label=None) -> None:
    """Apply both path implications to one configuration and record the outcome."""
    traj = origin_trajectory(x, params, steps)
    a = coarse_field_A(x, params)
    b = coarse_field_B(x, params)
    oa = a.index_of((0, 0))
    ob = b.index_of((0, 0))
    la = longest_path(a.cells, 1, (oa[1], oa[0]))
    if la > 0:
        rep.checked_a += 1
        upto = min(steps, la - 1)
        if any(traj[t] != 0 for t in range(upto + 1)):
            rep.failures.append({"claim": "A", "label": label, "path": la, "trajectory": traj})
    reach = reachable(b.cells, 0, (ob[1], ob[0]))
    if reach[-1, :].any() or reach[:, -1].any():
        rep.inconclusive += 1
        return
    beta = koenig_bound(b.cells, 0, (ob[1], ob[0]))
    t_fix = max(int(beta), 1)
    if t_fix > steps:
        rep.inconclusive += 1
        return
    rep.checked_b += 1
    if traj[t_fix] != 1:
        rep.failures.append({"claim": "B", "label": label, "bound": beta, "trajectory": traj})


def constructed_cases(params: TwoPhaseParams, side: int) -> list[tuple[str, Window]]:
    """Deterministic configurations exercising both implications."""
    n = params.n_block
    off = (-(side // 2), -(side // 2))
    zeros = Window(np.zeros((side, side), np.uint8), "zero", 0, off)
    ones = np.ones((side, side), np.uint8)
    stair = Window(ones.copy(), "zero", 0, off)
    for b in range(3):
        i, j = stair.index_of((0, b * n))
        stair.cells[i, j] = 0
    return [("all-zero", zeros), ("all-one", Window(ones, "zero", 0, off)), ("three-block-stair", stair)]


def verify_path_claims(params: TwoPhaseParams = TwoPhaseParams(), trials: int = 200,
                       side: int = 256, steps: int = 4, densities=(0.1, 0.25, 0.5),
                       seed: int = 0) -> PathReport:
    """Both implications of the coarse path argument, on constructed and sampled windows.

    If ``A`` has a 1-path of ``L`` cells from the origin block, the origin
    stays 0 for ``t <= L - 1``.  If every 0-path of ``B`` from the origin
    block has at most ``beta`` cells, the origin is 1 at ``t = max(beta, 1)``;
    the case is inconclusive when a 0-path touches the top row or right
    column of the coarse window, or when ``beta`` exceeds ``steps``.
    """
    rep = PathReport()
    cases = constructed_cases(params, side)
    for label, w in cases:
        check_path_claims_on(w, params, steps, rep, label)
    off = (-(side // 2), -(side // 2))
    remaining = trials - len(cases)
    per = [remaining // len(densities) + (i < remaining % len(densities)) for i in range(len(densities))]
    for di, (dens, count) in enumerate(zip(densities, per)):
        xs = _samples(seed + 15485863 * di, range(count), side, dens)
        for t in range(count):
            check_path_claims_on(Window(xs[t], "zero", 0, off), params, steps, rep, (dens, t))
    return rep


# -- witnesses and parameters --------------------------------------------------


def nonmonotone_witness(k: RuleKernel, params: TwoPhaseParams = TwoPhaseParams(), seed: int = 0,
                        attempts: int = 50):
    """Patches ``x <= y`` with ``k(x) = 1`` and ``k(y) = 0`` at the center, or ``None``.

    ``x`` is drawn at density ``eps1`` with a 0 at the center; ``y`` adds one
    all-1 ``N x N`` block near the center, which switches the density rule off.
    """
    n = params.n_block
    side = k.side
    c = k.radius
    g = np.random.default_rng(seed)
    for _ in range(attempts):
        x = (g.random((side, side)) < float(params.eps1)).astype(np.uint8)
        x[c, c] = 0
        if k.local(x) != 1:
            continue
        for dy in range(-n, 2):
            for dx in range(-n, 2):
                y = x.copy()
                y[c + dy : c + dy + n, c + dx : c + dx + n] = 1
                if y[c, c] == 0 and k.local(y) == 0:
                    return x, y
    return None


def hoeffding_density_failure(params: TwoPhaseParams, density) -> float:
    """Hoeffding bound on the chance that the ``(2N+1)^2`` window lands in the trigger band
    (``density`` outside the band) or misses it (``density`` inside)."""
    n = (2 * params.n_block + 1) ** 2
    d = Fraction(density)
    lo, hi = params.eps1 - params.delta, params.eps1 + params.delta
    gap = min(abs(d - lo), abs(d - hi))
    return min(1.0, hoeffding_bound(n, gap)) if gap > 0 else 1.0


def exploration_params(eps, max_block: int = 4096) -> tuple[TwoPhaseParams, dict]:
    """Parameters meeting both marginal lower bounds ``> 1 - eps``, from Hoeffding estimates.

    ``eps2 = eps / 2`` is fixed first; ``eps1`` and ``delta`` are placed at
    ``eps2 / 2`` and ``eps2 / 4`` and ``N`` is the least block size whose bounds
    pass.  These bounds are loose, so the resulting ``N`` is far beyond desk scale.
    """
    eps = Fraction(eps)
    eps2 = eps / 2
    eps1, delta = eps2 / 2, eps2 / 4
    for n in range(1, max_block + 1):
        p = TwoPhaseParams(n, eps1, eps2, delta)
        a_lb = 1 - float(eps2) - hoeffding_density_failure(p, eps2)
        b_lb = (1 - 81 * n * n * float(eps1) ** (n * n)
                - n * n * hoeffding_density_failure(p, eps1))
        if a_lb > 1 - eps and b_lb > 1 - eps:
            return p, {"A_lower_bound": a_lb, "B_lower_bound": b_lb}
    raise ValueError(f"no block size up to {max_block} satisfies the bounds")
