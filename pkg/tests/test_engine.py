import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freezeca.engine import (
    Boundary,
    Window,
    check_fixed_point_family,
    embed,
    origin_fixation_time,
    run_until_fixed,
    step,
)
from freezeca.errors import AlphabetMismatch, ExactnessViolated
from freezeca.rules import canonicalize_family, rule_from_family
from helpers import random_family

H = rule_from_family(canonicalize_family([{(0, 1), (1, 1)}]))
PAIR = canonicalize_family([{(-1, 0), (1, 0)}])


def test_all_one_fixed():
    w = Window(np.ones((7, 9)), Boundary.ZERO)
    for k in (H, rule_from_family(PAIR)):
        assert (step(w, k).cells == 1).all()


def test_h_fills_bottom_row():
    c = np.ones((5, 6), dtype=np.uint8)
    c[0] = 0
    out = step(Window(c, Boundary.ONE), H)
    assert (out.cells[0] == 1).all()


def test_single_zero_filled():
    c = np.ones((5, 5), dtype=np.uint8)
    c[2, 2] = 0
    assert step(Window(c, Boundary.ONE), rule_from_family(PAIR)).cells.all()


def test_margin_bookkeeping():
    w = Window(np.zeros((10, 10)), Boundary.ZERO)
    w = step(step(w, H), H)
    assert w.exact_margin == 2
    w = Window(np.zeros((10, 10)), Boundary.PERIODIC)
    assert step(w, H).exact_margin == 0
    w = Window(np.zeros((4, 4)), Boundary.ONE)
    for _ in range(5):
        w = step(w, H)
    assert w.exact_margin <= 2


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        step(Window(np.full((3, 3), 2), Boundary.ZERO), H)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(list(Boundary)))
def test_steppers_agree(seed, boundary):
    g = np.random.default_rng(seed)
    e = random_family(g, radius=int(g.integers(1, 3)), max_sets=3, max_cells=4)
    k = rule_from_family(e)
    h, wd = int(g.integers(1, 12)), int(g.integers(1, 70))
    w = Window((g.random((h, wd)) < g.random()).astype(np.uint8), boundary)
    packed = step(w, k, "packed").cells
    assert np.array_equal(packed, step(w, k, "scalar").cells)
    assert np.array_equal(packed, step(w, k, "array").cells)


def test_steppers_agree_bulk():
    g = np.random.default_rng(7)
    for _ in range(1000):
        e = random_family(g, radius=int(g.integers(1, 3)), max_sets=3, max_cells=4)
        k = rule_from_family(e)
        b = list(Boundary)[int(g.integers(0, 3))]
        w = Window((g.random((int(g.integers(1, 9)), int(g.integers(1, 9)))) < 0.5).astype(np.uint8), b)
        assert np.array_equal(step(w, k, "packed").cells, step(w, k, "scalar").cells)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_step_is_monotone_and_freezing(seed):
    g = np.random.default_rng(seed)
    k = rule_from_family(random_family(g, radius=2, max_sets=3, max_cells=4))
    x = (g.random((16, 20)) < 0.4).astype(np.uint8)
    y = x | (g.random(x.shape) < 0.2)
    for b in Boundary:
        fx, fy = step(Window(x, b), k).cells, step(Window(y, b), k).cells
        assert (fx <= fy).all() and (x <= fx).all()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([Boundary.ZERO, Boundary.ONE]))
def test_light_cone_exactness(seed, boundary):
    g = np.random.default_rng(seed)
    k = rule_from_family(random_family(g, radius=2, max_sets=3, max_cells=4))
    steps = int(g.integers(1, 4))
    pad = k.radius * steps
    big = (g.random((20 + 2 * pad, 24 + 2 * pad)) < 0.5).astype(np.uint8)
    inner = big[pad:-pad, pad:-pad]
    w = Window(inner, boundary)
    ref = Window(big, boundary)
    for _ in range(steps):
        w, ref = step(w, k), step(ref, k)
    sl = w.exact_slice()
    assert np.array_equal(w.cells[sl], ref.cells[pad:-pad, pad:-pad][sl])


def test_run_until_fixed_examples():
    w, rep = run_until_fixed(Window(np.zeros((6, 6)), Boundary.ZERO), H)
    assert rep.fixed and rep.steps_taken == 0 and not w.cells.any()
    win = embed({(0, 0), (1, 0)}, 3)
    w, rep = run_until_fixed(win, rule_from_family(PAIR))
    assert rep.fixed and rep.steps_taken == 0
    g = np.random.default_rng(3)
    c = (g.random((40, 40)) < 0.9).astype(np.uint8)
    w, rep = run_until_fixed(Window(c, Boundary.ONE), H)
    assert rep.fixed and w.cells.all() and rep.steps_taken <= 40


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_trajectories_non_decreasing(seed):
    g = np.random.default_rng(seed)
    k = rule_from_family(random_family(g, radius=1, max_sets=3, max_cells=3))
    start = (g.random((12, 12)) < 0.3).astype(np.uint8)
    w = Window(start, Boundary.ZERO)
    prev = w.cells
    final, rep = run_until_fixed(w, k, horizon=30)
    for _ in range(rep.steps_taken):
        w = step(w, k)
        assert (w.cells >= prev).all()
        prev = w.cells
    assert np.array_equal(w.cells, final.cells)
    assert sum(rep.changed_cells_per_step) == int(final.cells.sum()) - int(start.sum())


def test_origin_fixation_examples():
    w = Window(np.ones((5, 5)), Boundary.ONE, offset=(-2, -2))
    assert origin_fixation_time(w, H, 3) == 0
    # a vertical 0-path of length k above the origin, everything else 1
    for k in range(1, 6):
        c = np.ones((20, 20), dtype=np.uint8)
        c[5 : 5 + k, 8] = 0
        w = Window(c, Boundary.ONE, offset=(-8, -5))
        assert origin_fixation_time(w, H, 10) == k
    w = Window(np.zeros((8, 8)), Boundary.PERIODIC, offset=(-4, -4))
    assert origin_fixation_time(w, H, 20) is None
    w = Window(np.zeros((8, 8)), Boundary.ZERO, offset=(-4, -4))
    with pytest.raises(ExactnessViolated):
        origin_fixation_time(w, H, 20)


def test_fixed_point_family_examples():
    assert check_fixed_point_family({(0, 0), (1, 0)}, PAIR)
    assert not check_fixed_point_family({(0, 0)}, PAIR)
    assert check_fixed_point_family(set(), PAIR)
