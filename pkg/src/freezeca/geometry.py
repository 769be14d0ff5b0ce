"""Exact integer geometry in the plane.

Points are plain ``(x, y)`` tuples of Python ints, so arithmetic never
overflows and every predicate is decided exactly.  Rational thresholds are
:class:`fractions.Fraction`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Sequence

from .errors import EmptyPointSet, NotSeparable, OriginInHull

Vec = tuple[int, int]

ORIGIN: Vec = (0, 0)


def cross(a: Vec, b: Vec) -> int:
    return a[0] * b[1] - a[1] * b[0]


def dot(a: Vec, b: Vec) -> int:
    return a[0] * b[0] + a[1] * b[1]


def sub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1])


def neg(a: Vec) -> Vec:
    return (-a[0], -a[1])


def rot90(a: Vec) -> Vec:
    """Rotate counterclockwise by a quarter turn."""
    return (-a[1], a[0])


def rot270(a: Vec) -> Vec:
    return (a[1], -a[0])


def orient(a: Vec, b: Vec, c: Vec) -> int:
    """Twice the signed area of triangle abc (positive when counterclockwise)."""
    return cross(sub(b, a), sub(c, a))


def primitive(v: Vec) -> Vec:
    """Primitive integer representative of the direction of ``v``."""
    if v == ORIGIN:
        raise ValueError("the zero vector has no direction")
    g = math.gcd(v[0], v[1])
    return (v[0] // g, v[1] // g)


def is_primitive(v: Vec) -> bool:
    return v != ORIGIN and math.gcd(v[0], v[1]) == 1


def _half(v: Vec) -> int:
    return 0 if v[1] > 0 or (v[1] == 0 and v[0] > 0) else 1


def angle_cmp(a: Vec, b: Vec) -> int:
    """Compare polar angles in ``[0, 2*pi)`` measured from the positive x-axis."""
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    c = cross(a, b)
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


angle_key = cmp_to_key(angle_cmp)


def primitive_directions(max_norm_sq: int) -> list[Vec]:
    """All primitive vectors with squared norm at most ``max_norm_sq``, by angle."""
    r = math.isqrt(max_norm_sq)
    out = [
        (x, y)
        for x in range(-r, r + 1)
        for y in range(-r, r + 1)
        if 0 < x * x + y * y <= max_norm_sq and math.gcd(x, y) == 1
    ]
    out.sort(key=angle_key)
    return out


@dataclass(frozen=True)
class LatticePolygon:
    """Convex hull of lattice points, counterclockwise, no collinear triples.

    ``vertices`` holds one point for a degenerate point hull and the two
    endpoints for a segment; ``degenerate`` is set in both cases.
    """

    vertices: tuple[Vec, ...]

    @property
    def degenerate(self) -> bool:
        return len(self.vertices) < 3

    def edges(self) -> list[tuple[Vec, Vec]]:
        vs = self.vertices
        if len(vs) == 1:
            return []
        if len(vs) == 2:
            return [(vs[0], vs[1]), (vs[1], vs[0])]
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def face_directions(self) -> list[Vec]:
        """Primitive edge directions; a segment yields its direction and antipode."""
        return [primitive(sub(b, a)) for a, b in self.edges()]

    def diameter_sq(self) -> int:
        vs = self.vertices
        return max((dot(sub(a, b), sub(a, b)) for a in vs for b in vs), default=0)

    def contains(self, p: Vec) -> bool:
        """Closed containment test."""
        vs = self.vertices
        if len(vs) == 1:
            return p == vs[0]
        if len(vs) == 2:
            a, b = vs
            return (
                orient(a, b, p) == 0
                and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
            )
        return all(orient(a, b, p) >= 0 for a, b in self.edges())

    def lattice_points(self) -> list[Vec]:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return [
            (x, y)
            for y in range(min(ys), max(ys) + 1)
            for x in range(min(xs), max(xs) + 1)
            if self.contains((x, y))
        ]


def convex_hull(points: Iterable[Vec]) -> LatticePolygon:
    """Monotone-chain hull with collinear points dropped."""
    pts = sorted(set((int(p[0]), int(p[1])) for p in points))
    if not pts:
        raise EmptyPointSet("convex hull of an empty point set")
    if len(pts) <= 2:
        return LatticePolygon(tuple(pts))

    def chain(seq: Sequence[Vec]) -> list[Vec]:
        out: list[Vec] = []
        for p in seq:
            while len(out) >= 2 and orient(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 or all(orient(pts[0], pts[-1], p) == 0 for p in pts):
        return LatticePolygon((pts[0], pts[-1]))
    return LatticePolygon(tuple(hull))


def hull_contains_origin(hull: LatticePolygon) -> bool:
    return hull.contains(ORIGIN)


def _projection_range(poly: LatticePolygon, q: Vec) -> tuple[int, int]:
    vals = [dot(v, q) for v in poly.vertices]
    return min(vals), max(vals)


def separating_halfplane(a: LatticePolygon, b: LatticePolygon) -> tuple[Vec, Fraction]:
    """Return ``(normal, c)`` with ``a`` inside ``{z : z.normal <= c}`` and ``b`` strictly outside.

    Candidate normals are edge normals of both polygons and the directions
    between vertex pairs (with their perpendiculars); by the separating axis
    theorem one of them works whenever the hulls are disjoint.
    """
    candidates: list[Vec] = []
    for poly in (b, a):
        for u, w in poly.edges():
            candidates.append(rot90(sub(w, u)))
    for u in a.vertices:
        for w in b.vertices:
            d = sub(w, u)
            if d != ORIGIN:
                candidates.extend([d, rot90(d)])
    seen = set()
    for c in candidates:
        if c == ORIGIN:
            continue
        for q in (primitive(c), neg(primitive(c))):
            if q in seen:
                continue
            seen.add(q)
            _, amax = _projection_range(a, q)
            bmin, _ = _projection_range(b, q)
            if amax < bmin:
                return q, Fraction(amax + bmin, 2)
    raise NotSeparable("convex hulls intersect")


def nice_vector(hull: LatticePolygon) -> Vec:
    """Primitive ``v`` such that ``hull`` lies strictly on one side of the line through ``v``."""
    if hull_contains_origin(hull):
        raise OriginInHull("origin lies in the hull")
    q, _ = separating_halfplane(LatticePolygon((ORIGIN,)), hull)
    return (-q[1], q[0])


def _bezout(a: int, b: int) -> tuple[int, int]:
    """Return ``(s, t)`` with ``a*s + b*t == gcd(a, b)``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_s, s = s, old_s - k * s
        old_t, t = t, old_t - k * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


@dataclass(frozen=True)
class UnimodularMap:
    """Change of lattice basis ``z = T @ S^-1 @ u`` with ``S`` the shear ``((1, t), (0, 1))``.

    ``matrix`` is ``T`` stored row-wise; ``to_normal`` sends original
    coordinates to normalized ones and ``from_normal`` inverts it.
    """

    matrix: tuple[tuple[int, int], tuple[int, int]]
    shear_power: int = 0

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    def to_normal(self, z: Vec) -> Vec:
        (a, b), (c, d) = self.matrix
        det = self.det
        # T^-1 = adj(T) / det with det = +-1
        u = ((d * z[0] - b * z[1]) * det, (-c * z[0] + a * z[1]) * det)
        return (u[0] + self.shear_power * u[1], u[1])

    def from_normal(self, u: Vec) -> Vec:
        (a, b), (c, d) = self.matrix
        w = (u[0] - self.shear_power * u[1], u[1])
        return (a * w[0] + b * w[1], c * w[0] + d * w[1])


def normalize_growth_set(n_set: Iterable[Vec]) -> tuple[UnimodularMap, frozenset[Vec]]:
    """Unimodular change of basis putting an origin-free-hull set into ``Z>=0 x Z>0``."""
    pts = list(n_set)
    hull = convex_hull(pts)
    v = nice_vector(hull)
    s, t = _bezout(v[0], v[1])
    # v[0]*s + v[1]*t == 1, so w = (-t, s) gives cross(v, w) == 1
    w = (-t, s)
    side = cross(v, pts[0])
    if side * cross(v, w) < 0:
        w = neg(w)
    tmap = UnimodularMap(((v[0], w[0]), (v[1], w[1])))
    coords = [tmap.to_normal(p) for p in pts]
    shear = 0
    for a, b in coords:
        # b >= 1 here; need a + shear*b >= 0
        shear = max(shear, -((a) // b) if a < 0 else 0)
    full = UnimodularMap(tmap.matrix, shear)
    return full, frozenset(full.to_normal(p) for p in pts)


def _canonical_axis(d: Vec) -> Vec:
    """Representative of the antipodal class of a primitive direction."""
    return d if d[0] > 0 or (d[0] == 0 and d[1] > 0) else neg(d)


def _scale_exceeding(gen: Vec, min_len_sq: Fraction) -> int:
    """Least positive k with ``k * |gen|`` strictly greater than ``sqrt(min_len_sq)``."""
    target = Fraction(min_len_sq) / dot(gen, gen)
    return math.isqrt(math.floor(target)) + 1


def build_zonotope(
    directions: Iterable[Vec],
    min_face_length: Fraction | int | None = None,
    *,
    min_face_length_sq: Fraction | int | None = None,
) -> LatticePolygon:
    """Centrally symmetric lattice polygon with long faces in the given directions.

    One generator per antipodal class of ``directions`` (a perpendicular one
    is added when they are all parallel; the unit square generators are used
    when there are none), each scaled to the least multiple strictly longer
    than the minimum face length.  Pass the length squared through
    ``min_face_length_sq`` when it is irrational (e.g. a diameter).
    """
    if min_face_length_sq is None:
        if min_face_length is None:
            raise TypeError("min_face_length or min_face_length_sq is required")
        min_face_length_sq = Fraction(min_face_length) ** 2
    min_face_length_sq = Fraction(min_face_length_sq)
    gens = sorted({_canonical_axis(primitive(d)) for d in directions}, key=angle_key)
    if not gens:
        gens = [(1, 0), (0, 1)]
    elif len(gens) == 1:
        gens.append(_canonical_axis(rot90(gens[0])))
        gens.sort(key=angle_key)
    scaled = [(g[0] * k, g[1] * k) for g in gens for k in [_scale_exceeding(g, min_face_length_sq)]]
    edges = scaled + [neg(g) for g in scaled]
    edges.sort(key=angle_key)
    verts = [ORIGIN]
    for e in edges[:-1]:
        last = verts[-1]
        verts.append((last[0] + e[0], last[1] + e[1]))
    return LatticePolygon(tuple(verts))
