import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freezeca import percolation as pc
from freezeca.engine import Boundary, Window, step
from freezeca.rules import canonicalize_family, rule_from_family
from freezeca.twophase import TwoPhaseParams, field_A_spec, field_B_spec

H = rule_from_family(canonicalize_family([{(0, 1), (1, 1)}]), name="h")


def dfs_crossing(cells, symbol, x0=0, y0=0):
    """Explicit path search, independent of the row sweep."""
    h, w = cells.shape
    if cells[y0, x0] != symbol:
        return False
    stack, seen = [(x0, y0)], set()
    while stack:
        x, y = stack.pop()
        if y == h - 1:
            return True
        for dx in (0, 1):
            nx, ny = x + dx, y + 1
            if nx < w and cells[ny, nx] == symbol and (nx, ny) not in seen:
                seen.add((nx, ny))
                stack.append((nx, ny))
    return False


def longest_path(cells, symbol, x, y):
    h, w = cells.shape
    if not (0 <= x < w and y < h) or cells[y, x] != symbol:
        return 0
    return 1 + max(longest_path(cells, symbol, x, y + 1), longest_path(cells, symbol, x + 1, y + 1))


def test_sample_window_extremes_and_density():
    assert pc.sample_window(pc.BernoulliSpec(1, 3), 20, 10).cells.all()
    assert not pc.sample_window(pc.BernoulliSpec(0, 3), 20, 10).cells.any()
    w = pc.sample_window(pc.BernoulliSpec(Fraction(1, 2), 9), 64, 64)
    assert abs(w.cells.mean() - 0.5) < 4 / (2 * 64)
    with pytest.raises(ValueError):
        pc.BernoulliSpec(1.5)


def test_crossing_examples():
    assert pc.directed_crossing(np.ones((5, 5)), 1)
    c = np.ones((4, 4), dtype=np.uint8)
    c[-1] = 0
    assert not pc.directed_crossing(c, 1)
    c = np.zeros((3, 3), dtype=np.uint8)
    for x, y in [(0, 0), (0, 1), (1, 2)]:
        c[y, x] = 1
    assert pc.directed_crossing(c, 1)
    w = Window(c, Boundary.ZERO, offset=(-1, -1))
    assert pc.directed_crossing(w, 1, (-1, -1))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_crossing_matches_dfs(seed):
    g = np.random.default_rng(seed)
    c = (g.random((int(g.integers(1, 9)), int(g.integers(1, 9)))) < g.random()).astype(np.uint8)
    for s in (0, 1):
        assert pc.directed_crossing(c, s) == dfs_crossing(c, s)
    more = c | (g.random(c.shape) < 0.3)
    if pc.directed_crossing(c, 1):
        assert pc.directed_crossing(more, 1)


def test_koenig_examples():
    c = np.zeros((8, 8), dtype=np.uint8)
    assert pc.koenig_bound(c, 1) == 0
    c[0, 0] = 1
    assert pc.koenig_bound(c, 1) == 1
    c = np.zeros((10, 10), dtype=np.uint8)
    for i in range(5):
        c[i, i] = 1
    assert pc.koenig_bound(c, 1) == 5
    assert pc.koenig_bound(np.ones((4, 4)), 1) == pc.INFINITE


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_koenig_matches_recursion(seed):
    g = np.random.default_rng(seed)
    c = (g.random((7, 7)) < 0.5).astype(np.uint8)
    b = pc.koenig_bound(c, 0)
    if b == pc.INFINITE:
        assert dfs_crossing(c, 0)
    else:
        assert b == longest_path(c, 0, 0, 0)


def test_koenig_drops_by_one_under_h():
    g = np.random.default_rng(4)
    checked = 0
    for _ in range(200):
        c = (g.random((24, 24)) < 0.6).astype(np.uint8)
        origin = (4, 0)
        b = pc.koenig_bound(c, 0, origin)
        if b in (0, pc.INFINITE):
            continue
        nxt = step(Window(c, Boundary.ONE), H).cells
        assert pc.koenig_bound(nxt, 0, origin) == b - 1
        checked += 1
    assert checked > 50


def test_wilson_and_rows():
    lo, hi = pc.wilson(5, 10)
    assert lo < 0.5 < hi
    assert pc.wilson(0, 10)[0] == 0 and pc.wilson(10, 10)[1] == 1
    row = pc.ScanRow.from_count(0.3, 7, 20)
    assert row.ci_low <= row.estimate <= row.ci_high


def exact_crossing_4x4(p):
    total = Fraction(0)
    pf = Fraction(p)
    for bits in range(1 << 16):
        c = np.array([(bits >> i) & 1 for i in range(16)], dtype=np.uint8).reshape(4, 4)
        if dfs_crossing(c, 1):
            k = int(c.sum())
            total += pf**k * (1 - pf) ** (16 - k)
    return float(total)


def test_survival_extremes():
    assert pc.survival_estimate(1, 1, 6, 6, 100).estimate == 1
    assert pc.survival_estimate(1, 0, 6, 6, 100).estimate == 0


def test_survival_close_to_exact():
    exact = exact_crossing_4x4(Fraction(1, 2))
    row = pc.survival_estimate(1, 0.5, 4, 4, 20_000, seed=2)
    assert abs(row.estimate - exact) < 4 * math.sqrt(exact * (1 - exact) / 20_000)


def test_coupled_monotone_in_p():
    res = pc.survival_curve(1, [0.1, 0.3, 0.5, 0.7, 0.9], 8, 8, 2000, seed=1)
    est = res.estimates()
    assert (np.diff(est) >= 0).all()


def test_fixation_scan_basics():
    res = pc.fixation_scan(H, [0.0, 0.6, 1.0], 32, 32, 64, 20, seed=5)
    assert res.rows[-1].estimate == 1
    assert res.rows[0].estimate == 0
    assert res.to_csv().splitlines()[0] == "p,trials,estimate,ci_low,ci_high"
    assert res.metadata["boundary"] == "periodic" and res.metadata["caveats"]
    a = pc.fixation_scan(H, [0.2, 0.3, 0.4], 32, 32, 64, 30, seed=5, threads=1, batch=7)
    b = pc.fixation_scan(H, [0.2, 0.3, 0.4], 32, 32, 64, 30, seed=5, threads=3, batch=11)
    assert a.to_csv() == b.to_csv()
    assert (np.diff(a.estimates()) >= 0).all()


def test_crossover_interpolation():
    res = pc.ScanResult([pc.ScanRow.from_count(0.1, 0, 10), pc.ScanRow.from_count(0.3, 10, 10)])
    assert pc.crossover(res) == pytest.approx(0.2)


def brute_dependence(spec: pc.FieldSpec, reach: int = 30) -> int:
    """Largest sup-distance between coarse cells whose read regions overlap."""

    def region(a):
        return {(spec.block * a[0] + dx, spec.block * a[1] + dy)
                for dx in range(spec.lo[0], spec.hi[0] + 1) for dy in range(spec.lo[1], spec.hi[1] + 1)}

    base = region((0, 0))
    worst = 0
    for a in range(0, reach):
        if region((a, 0)) & base or region((a, a)) & base:
            worst = a
    return worst


def test_dependence_radius():
    assert pc.dependence_radius(pc.FieldSpec()) == 0
    for r in range(4):
        assert pc.dependence_radius(pc.FieldSpec.square(r)) == 2 * r == brute_dependence(pc.FieldSpec.square(r))
    p = TwoPhaseParams()
    for spec in (field_A_spec(p), field_B_spec(p)):
        assert pc.dependence_radius(spec) == brute_dependence(spec)
    # the exact reach of g gives 9 block units at N = 4, not 5
    assert pc.dependence_radius(field_A_spec(p)) == 9


def test_hoeffding():
    assert pc.hoeffding_bound(100, 0.1) == pytest.approx(2 * math.exp(-2), rel=1e-12)
    assert pc.hoeffding_bound(1, 1) < 1
    with pytest.raises(ValueError):
        pc.hoeffding_bound(0, 0.1)
    with pytest.raises(ValueError):
        pc.hoeffding_bound(10, 0)


def test_deviation_frequency_exact_counting():
    # n = 4, eps = 1/4: sample means 0 and 1 deviate by 1/2 > 1/4, 1/4 and 3/4 exactly 1/4 do not
    f = pc.deviation_frequency(4, Fraction(1, 4), trials=200_000, seed=1)
    assert abs(f - 2 / 16) < 0.005
