from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from freezeca.errors import EmptyPointSet, NotSeparable, OriginInHull
from freezeca.geometry import (
    LatticePolygon,
    build_zonotope,
    convex_hull,
    cross,
    dot,
    hull_contains_origin,
    is_primitive,
    nice_vector,
    normalize_growth_set,
    orient,
    primitive_directions,
    separating_halfplane,
    sub,
)

coords = st.integers(-8, 8)
points = st.tuples(coords, coords)


def _in_triangle(p, a, b, c):
    if orient(a, b, c) == 0:
        return False
    o1, o2, o3 = orient(a, b, p), orient(b, c, p), orient(c, a, p)
    return (o1 >= 0 and o2 >= 0 and o3 >= 0) or (o1 <= 0 and o2 <= 0 and o3 <= 0)


def _on_segment(p, a, b):
    return orient(a, b, p) == 0 and dot(sub(p, a), sub(p, b)) <= 0


def brute_vertices(pts):
    """Extreme points: those not inside any triangle or segment spanned by the others."""
    pts = set(pts)
    out = set()
    for p in pts:
        rest = pts - {p}
        covered = any(_on_segment(p, a, b) for a, b in combinations(rest, 2)) or any(
            _in_triangle(p, a, b, c) for a, b, c in combinations(rest, 3)
        )
        if not covered:
            out.add(p)
    return out


def test_hull_examples():
    assert convex_hull({(0, 1), (1, 1)}).vertices == ((0, 1), (1, 1))
    assert convex_hull({(0, 0)}).vertices == ((0, 0),)
    tri = convex_hull({(0, 0), (2, 0), (1, 1), (1, 0)})
    assert set(tri.vertices) == {(0, 0), (2, 0), (1, 1)}
    assert not tri.degenerate
    with pytest.raises(EmptyPointSet):
        convex_hull([])


@settings(max_examples=300, deadline=None)
@given(st.sets(points, min_size=1, max_size=12))
def test_hull_matches_brute_force(pts):
    hull = convex_hull(pts)
    assert set(hull.vertices) == brute_vertices(pts)
    vs = hull.vertices
    if len(vs) >= 3:
        assert all(orient(vs[i], vs[(i + 1) % len(vs)], vs[(i + 2) % len(vs)]) > 0 for i in range(len(vs)))
    assert all(hull.contains(p) for p in pts)


def test_origin_containment_examples():
    assert hull_contains_origin(convex_hull({(-1, 0), (1, 0)}))
    assert not hull_contains_origin(convex_hull({(0, 1), (1, 1)}))
    assert hull_contains_origin(convex_hull({(1, 0), (0, 1), (-1, -1)}))


def _check_separator(a, b, normal, c):
    assert is_primitive(normal)
    assert all(dot(v, normal) <= c for v in a.vertices)
    assert all(dot(v, normal) > c for v in b.vertices)


def test_separating_examples():
    a = LatticePolygon(((0, 0),))
    b = convex_hull({(0, 1), (1, 1)})
    _check_separator(a, b, *separating_halfplane(a, b))
    n, c = separating_halfplane(a, LatticePolygon(((5, 0),)))
    assert n == (1, 0) and 0 < c < 5
    with pytest.raises(NotSeparable):
        separating_halfplane(convex_hull({(0, 0), (2, 0)}), convex_hull({(2, 0), (3, 3)}))


@settings(max_examples=200, deadline=None)
@given(st.sets(points, min_size=1, max_size=6), st.sets(points, min_size=1, max_size=6))
def test_separator_or_intersection(pa, pb):
    a, b = convex_hull(pa), convex_hull(pb)
    try:
        n, c = separating_halfplane(a, b)
    except NotSeparable:
        # oracle: some point of one hull lies in the other, or two edges cross
        def seg_cross(p, q, r, s):
            d1, d2 = orient(p, q, r), orient(p, q, s)
            d3, d4 = orient(r, s, p), orient(r, s, q)
            if d1 * d2 < 0 and d3 * d4 < 0:
                return True
            return _on_segment(r, p, q) or _on_segment(s, p, q) or _on_segment(p, r, s) or _on_segment(q, r, s)

        ea = a.edges() or [(a.vertices[0], a.vertices[0])]
        eb = b.edges() or [(b.vertices[0], b.vertices[0])]
        meets = any(a.contains(v) for v in b.vertices) or any(b.contains(v) for v in a.vertices)
        meets = meets or any(seg_cross(p, q, r, s) for p, q in ea for r, s in eb)
        assert meets
    else:
        _check_separator(a, b, n, c)


def test_nice_vector_examples():
    v = nice_vector(convex_hull({(0, 1), (1, 1)}))
    assert v in {(1, 0), (-1, 0)}
    assert nice_vector(convex_hull({(3, 0)})) in {(0, 1), (0, -1)}
    with pytest.raises(OriginInHull):
        nice_vector(convex_hull({(-1, 0), (1, 0)}))


@settings(max_examples=300, deadline=None)
@given(st.sets(points, min_size=1, max_size=6))
def test_nice_vector_side(pts):
    hull = convex_hull(pts)
    if hull_contains_origin(hull):
        return
    v = nice_vector(hull)
    sides = {(cross(v, p) > 0) - (cross(v, p) < 0) for p in pts}
    assert sides in ({1}, {-1})


def test_normalize_examples():
    m, img = normalize_growth_set({(0, 1), (1, 1)})
    assert abs(m.det) == 1
    assert all(a >= 0 and b > 0 for a, b in img)
    assert {m.from_normal(u) for u in img} == {(0, 1), (1, 1)}
    m, img = normalize_growth_set({(0, 1)})
    assert img == {(0, 1)} or all(a >= 0 and b > 0 for a, b in img)
    with pytest.raises(OriginInHull):
        normalize_growth_set({(-1, 0), (1, 0)})


@settings(max_examples=1000, deadline=None)
@given(st.sets(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=6))
def test_normalize_property(pts):
    if (0, 0) in pts or hull_contains_origin(convex_hull(pts)):
        return
    m, img = normalize_growth_set(pts)
    assert abs(m.det) == 1
    assert all(a >= 0 and b > 0 for a, b in img)
    assert {m.from_normal(u) for u in img} == set(pts)


def _faces(poly):
    return [(sub(b, a)) for a, b in poly.edges()]


def test_zonotope_examples():
    sq = build_zonotope([(1, 0)], 2)
    assert sorted(map(tuple, _faces(sq))) == sorted([(3, 0), (0, 3), (-3, 0), (0, -3)])
    sq = build_zonotope([(1, 0), (0, 1)], 1)
    assert set(sq.vertices) == {(0, 0), (2, 0), (2, 2), (0, 2)}
    sq = build_zonotope([], 1)
    assert set(sq.vertices) == {(0, 0), (2, 0), (2, 2), (0, 2)}


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(primitive_directions(50)), min_size=1, max_size=5),
       st.fractions(min_value=Fraction(1, 3), max_value=6))
def test_zonotope_faces(dirs, length):
    z = build_zonotope(dirs, length)
    faces = _faces(z)
    vs = z.vertices
    assert all(orient(vs[i], vs[(i + 1) % len(vs)], vs[(i + 2) % len(vs)]) > 0 for i in range(len(vs)))
    for d in dirs:
        for s in (1, -1):
            dd = (s * d[0], s * d[1])
            par = [f for f in faces if cross(f, dd) == 0 and dot(f, dd) > 0]
            assert par and all(dot(f, f) > length**2 for f in par)
    # central symmetry
    cx = sum(v[0] for v in vs)
    cy = sum(v[1] for v in vs)
    centre = (Fraction(cx, len(vs)), Fraction(cy, len(vs)))
    assert {(2 * centre[0] - v[0], 2 * centre[1] - v[1]) for v in vs} == set(vs)
