"""Shared generators for tests."""
import numpy as np
from hypothesis import strategies as st

from freezeca.rules import canonicalize_family


def random_family(g: np.random.Generator, radius: int = 3, max_sets: int = 4, max_cells: int = 6):
    cells = [(x, y) for x in range(-radius, radius + 1) for y in range(-radius, radius + 1) if (x, y) != (0, 0)]
    k = int(g.integers(1, max_sets + 1))
    sets = []
    for _ in range(k):
        m = int(g.integers(1, max_cells + 1))
        idx = g.choice(len(cells), size=m, replace=False)
        sets.append({cells[i] for i in idx})
    return canonicalize_family(sets)


def offsets(radius):
    return st.tuples(st.integers(-radius, radius), st.integers(-radius, radius)).filter(lambda c: c != (0, 0))


def families(radius=2, max_sets=4, max_cells=5):
    return st.lists(st.sets(offsets(radius), min_size=1, max_size=max_cells), min_size=1,
                    max_size=max_sets).map(canonicalize_family)
