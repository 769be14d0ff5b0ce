import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freezeca import blockcode as bc, tmca
from freezeca.engine import Boundary, Window

HALT = tmca.TMSpec.from_json(tmca.EXAMPLE_HALTING)


@pytest.fixture(scope="module")
def setup():
    ct, pattern = tmca.halting_obstacle(HALT)
    code = bc.BlockCode.for_alphabet(ct.alphabet.size, ct.alphabet.m)
    return ct, pattern, code, bc.gt_kernel(code, ct)


def test_block_side():
    assert bc.min_block_side(67) == 7
    assert bc.min_block_side(2) == 5
    with pytest.raises(ValueError):
        bc.BlockCode(5, 10, 0)


def test_codebook_injective(setup):
    _, _, code, _ = setup
    book = code.codebook().reshape(code.states, -1)
    assert len({r.tobytes() for r in book}) == code.states
    assert book[code.m].all()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip(seed):
    g = np.random.default_rng(seed)
    code = bc.BlockCode.for_alphabet(67, 66)
    x = g.integers(0, 67, size=(4, 5))
    assert np.array_equal(bc.decode_array(code, bc.encode_array(code, x)), x)


def test_invalid_blocks():
    code = bc.BlockCode.for_alphabet(67, 66)
    b = code.block(3)
    b[1, 2] = 1  # inner ring must be 0
    assert bc.decode_array(code, b)[0, 0] == bc.INVALID
    b = code.block(3)
    b[0, 3] = 0
    assert bc.decode_array(code, b)[0, 0] == bc.INVALID
    # payload rank beyond the alphabet
    b = code.block(3)
    _, _, payload = code.rings
    b[payload] = 1
    assert bc.decode_array(code, b)[0, 0] == bc.INVALID


def test_all_m_and_noise(setup):
    ct, _, code, gt = setup
    ones = np.ones((6 * code.n, 6 * code.n), np.uint8)
    assert gt.apply_valid(ones).all()
    g = np.random.default_rng(0)
    noise = (g.random((6 * code.n, 6 * code.n)) < 0.5).astype(np.uint8)
    assert gt.apply_valid(noise).all()


def test_gt_freezing(setup):
    _, _, code, gt = setup
    g = np.random.default_rng(2)
    x = bc.encode_array(code, g.integers(0, code.states, size=(6, 6)))
    y = gt.apply_valid(x)
    r = gt.radius
    assert (y >= x[r:-r, r:-r]).all()


def _commutes(ct, code, gt, coarse):
    a = bc.encode_array(code, ct.kernel.apply_valid(coarse))
    b = gt.apply_valid(bc.encode_array(code, coarse))
    off = gt.radius - code.n
    return np.array_equal(a[off : a.shape[0] - off, off : a.shape[1] - off], b)


def test_commutation(setup):
    ct, pattern, code, gt = setup
    g = np.random.default_rng(4)
    for k in range(12):
        x = g.integers(0, code.states, size=(pattern.shape[0] + 4, pattern.shape[1] + 4), dtype=np.uint8)
        if k % 3:
            x[2:-2, 2:-2] = pattern
        if k % 3 == 2:
            x[int(g.integers(2, x.shape[0] - 2)), int(g.integers(2, x.shape[1] - 2))] = int(g.integers(0, code.states))
        assert _commutes(ct, code, gt, x)


def test_block_window_helpers(setup):
    _, _, code, _ = setup
    w = Window(np.arange(6, dtype=np.uint8).reshape(2, 3), Boundary.ONE, 0, (1, -1))
    fine = bc.block_encode(code, w)
    assert fine.offset == (code.n, -code.n)
    states, bad = bc.block_decode(code, fine)
    assert np.array_equal(states, w.cells) and not bad.any()
