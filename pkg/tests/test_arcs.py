import math

from hypothesis import given, settings, strategies as st

from freezeca.arcs import Arc, ArcSet
from freezeca.geometry import primitive_directions

DIRS = primitive_directions(100)
SAMPLE = primitive_directions(400)


def _angle(v):
    return math.atan2(v[1], v[0]) % (2 * math.pi)


def oracle_contains(arc: Arc, d) -> bool:
    """Float-angle membership, independent of the exact breakpoint machinery."""
    a, b, x = _angle(arc.start), _angle(arc.end), _angle(d)
    if arc.start == arc.end:
        return arc.is_point if x == a else not arc.is_point
    if x == a:
        return arc.start_closed
    if x == b:
        return arc.end_closed
    return (x - a) % (2 * math.pi) < (b - a) % (2 * math.pi)


arcs = st.builds(Arc, st.sampled_from(DIRS), st.sampled_from(DIRS), st.booleans(), st.booleans())
arc_sets = st.lists(arcs, max_size=4).map(ArcSet.from_arcs)


@settings(max_examples=200, deadline=None)
@given(arcs)
def test_single_arc_membership(arc):
    s = ArcSet.from_arc(arc)
    assert all(s.contains(d) == oracle_contains(arc, d) for d in SAMPLE)


@settings(max_examples=150, deadline=None)
@given(st.lists(arcs, max_size=4))
def test_union_membership(arc_list):
    s = ArcSet.from_arcs(arc_list)
    for d in SAMPLE:
        assert s.contains(d) == any(oracle_contains(a, d) for a in arc_list)


@settings(max_examples=150, deadline=None)
@given(arc_sets, arc_sets)
def test_de_morgan_and_idempotence(a, b):
    assert (a | b).complement() == a.complement() & b.complement()
    assert (a & b).complement() == a.complement() | b.complement()
    assert a | a == a and a & a == a
    assert a.complement().complement() == a
    parts = a.arcs()
    assert (ArcSet.circle() if parts is None else ArcSet.from_arcs(parts)) == a
    assert a.interior().interior() == a.interior()
    assert (a | b).contains((1, 0)) == (a.contains((1, 0)) or b.contains((1, 0)))


@settings(max_examples=150, deadline=None)
@given(arc_sets)
def test_interior_and_closure_pointwise(a):
    inner, clo = a.interior(), a.closure()
    for d in SAMPLE:
        if inner.contains(d):
            assert a.contains(d)
        if a.contains(d):
            assert clo.contains(d)


def test_examples():
    assert ArcSet.circle().complement().is_empty
    closed = ArcSet.from_arc(Arc((1, 0), (0, 1), True, True))
    assert closed.interior() == ArcSet.from_arc(Arc((1, 0), (0, 1)))
    big = ArcSet.from_arc(Arc((1, 0), (0, -1)))  # open arc of length 3pi/2
    assert big.has_arc_at_least_pi()
    assert not big.complement().has_arc_at_least_pi()


def test_semicircle_lengths():
    half = Arc((1, 0), (-1, 0))
    assert half.length_at_least_pi() and not half.length_exceeds_pi()
    assert not half.contains_closed_semicircle()
    assert Arc((1, 0), (-1, 0), True, True).contains_closed_semicircle()
    assert not Arc((1, 0), (0, 1)).length_at_least_pi()
    assert Arc((1, 0), (1, -1)).length_exceeds_pi()
