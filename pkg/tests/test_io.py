import pathlib
import tempfile

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freezeca import io


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 20), st.integers(1, 20), st.integers(0, 2**32 - 1), st.booleans())
def test_pbm_round_trip(h, w, seed, binary):
    cells = (np.random.default_rng(seed).random((h, w)) < 0.5).astype(np.uint8)
    with tempfile.TemporaryDirectory() as d:
        path = pathlib.Path(d) / "x.pbm"
        io.write_pbm(path, cells, binary=binary)
        assert np.array_equal(io.read_pbm(path), cells)


def test_pbm_orientation(tmp_path):
    cells = np.zeros((2, 3), np.uint8)
    cells[0, 0] = 1  # bottom-left in lattice coordinates
    io.write_pbm(tmp_path / "a.pbm", cells)
    text = (tmp_path / "a.pbm").read_text().split()
    assert text[:3] == ["P1", "3", "2"]
    assert text[3:] == ["0", "0", "0", "1", "0", "0"]


def test_pbm_comments(tmp_path):
    (tmp_path / "c.pbm").write_text("P1\n# note\n2 1\n1 0\n")
    assert io.read_pbm(tmp_path / "c.pbm").tolist() == [[1, 0]]


def test_pbm_rejects_other_formats(tmp_path):
    (tmp_path / "b.pbm").write_text("P2\n1 1\n1\n0\n")
    with pytest.raises(ValueError):
        io.read_pbm(tmp_path / "b.pbm")


def test_json_grid_round_trip(tmp_path):
    cells = np.array([[0, 1, 2], [2, 2, 0]], np.uint8)
    labels = ["a", "b", "M"]
    data = io.grid_to_json(cells, labels)
    assert data["rows_top_first"][0] == ["M", "M", "a"]
    assert np.array_equal(io.grid_from_json(data, labels), cells)
    assert np.array_equal(io.grid_from_json(io.grid_to_json(cells)), cells)
