"""Finite unions of circular arcs with rational-direction endpoints.

An :class:`ArcSet` is stored as the sorted list of its breakpoints together
with a membership bit for every breakpoint and for every open gap between
consecutive breakpoints.  Set algebra refines both operands to a common
breakpoint list and combines bits, so everything is exact.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable, Iterable

from .geometry import Vec, angle_cmp, angle_key, cross, dot, neg, primitive


@dataclass(frozen=True)
class Arc:
    """Counterclockwise arc from ``start`` to ``end``.

    ``start == end`` with both ends closed is a single point; with both ends
    open it is the circle minus that point.  The full circle is not an
    :class:`Arc`; :meth:`ArcSet.arcs` reports it as ``None``.
    """

    start: Vec
    end: Vec
    start_closed: bool = False
    end_closed: bool = False

    @property
    def is_point(self) -> bool:
        return self.start == self.end and self.start_closed and self.end_closed

    def length_at_least_pi(self) -> bool:
        if self.start == self.end:
            return not self.is_point
        return cross(self.start, self.end) <= 0

    def length_exceeds_pi(self) -> bool:
        if self.start == self.end:
            return not self.is_point
        c = cross(self.start, self.end)
        return c < 0 or (c == 0 and dot(self.start, self.end) > 0)

    def contains_closed_semicircle(self) -> bool:
        if self.length_exceeds_pi():
            return True
        is_half = self.start != self.end and cross(self.start, self.end) == 0
        return is_half and self.start_closed and self.end_closed

    def to_json(self) -> dict:
        return {
            "start": list(self.start),
            "end": list(self.end),
            "start_closed": self.start_closed,
            "end_closed": self.end_closed,
        }


@dataclass(frozen=True)
class ArcSet:
    points: tuple[Vec, ...] = ()
    point_in: tuple[bool, ...] = ()
    gap_in: tuple[bool, ...] = ()
    full: bool = False  # only meaningful without breakpoints

    @classmethod
    def empty(cls) -> "ArcSet":
        return cls()

    @classmethod
    def circle(cls) -> "ArcSet":
        return cls(full=True)

    @classmethod
    def from_arc(cls, arc: Arc) -> "ArcSet":
        s, e = primitive(arc.start), primitive(arc.end)
        if s == e:
            if arc.is_point:
                return cls((s,), (True,), (False,))
            return cls((s,), (False,), (True,))
        # gap from s to e is inside, gap from e back to s is outside
        if angle_cmp(s, e) < 0:
            return cls((s, e), (arc.start_closed, arc.end_closed), (True, False))
        return cls((e, s), (arc.end_closed, arc.start_closed), (False, True))

    @classmethod
    def from_arcs(cls, arcs: Iterable[Arc]) -> "ArcSet":
        out = cls.empty()
        for a in arcs:
            out = out | cls.from_arc(a)
        return out

    @property
    def is_empty(self) -> bool:
        return not self.points and not self.full

    @property
    def is_full(self) -> bool:
        return not self.points and self.full

    def _locate(self, d: Vec) -> tuple[bool, int]:
        """``(True, i)`` if ``d`` is breakpoint ``i``, else ``(False, j)`` for gap ``j``."""
        keys = [angle_key(p) for p in self.points]
        i = bisect_left(keys, angle_key(d))
        if i < len(self.points) and angle_cmp(self.points[i], d) == 0:
            return True, i
        return False, (i - 1) % len(self.points)

    def contains(self, d: Vec) -> bool:
        if not self.points:
            return self.full
        is_pt, i = self._locate(primitive(d))
        return self.point_in[i] if is_pt else self.gap_in[i]

    def _membership_on(self, pts: list[Vec]) -> tuple[list[bool], list[bool]]:
        if not self.points:
            return [self.full] * len(pts), [self.full] * len(pts)
        pin, gin = [], []
        for p in pts:
            is_pt, i = self._locate(p)
            pin.append(self.point_in[i] if is_pt else self.gap_in[i])
            gin.append(self.gap_in[i])
        return pin, gin

    def _combine(self, other: "ArcSet", op: Callable[[bool, bool], bool]) -> "ArcSet":
        pts = sorted({*self.points, *other.points}, key=angle_key)
        if not pts:
            return ArcSet(full=op(self.full, other.full))
        ap, ag = self._membership_on(pts)
        bp, bg = other._membership_on(pts)
        return ArcSet(
            tuple(pts),
            tuple(op(x, y) for x, y in zip(ap, bp)),
            tuple(op(x, y) for x, y in zip(ag, bg)),
        ).normalized()

    def normalized(self) -> "ArcSet":
        if not self.points:
            return ArcSet(full=self.full)
        pts, pin, gin = list(self.points), list(self.point_in), list(self.gap_in)
        changed = True
        while changed and pts:
            changed = False
            for i in range(len(pts)):
                if pin[i] == gin[i] == gin[i - 1]:
                    # merge gap i-1, point i and gap i
                    del pts[i], pin[i]
                    keep = gin[i]
                    del gin[i]
                    if gin:
                        gin[(i - 1) % len(gin)] = keep
                    else:
                        return ArcSet(full=keep)
                    changed = True
                    break
        return ArcSet(tuple(pts), tuple(pin), tuple(gin))

    def __or__(self, other: "ArcSet") -> "ArcSet":
        return self._combine(other, lambda x, y: x or y)

    def __and__(self, other: "ArcSet") -> "ArcSet":
        return self._combine(other, lambda x, y: x and y)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ArcSet):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return (a.points, a.point_in, a.gap_in, a.full if not a.points else None) == (
            b.points,
            b.point_in,
            b.gap_in,
            b.full if not b.points else None,
        )

    def __hash__(self) -> int:
        n = self.normalized()
        return hash((n.points, n.point_in, n.gap_in, n.full if not n.points else None))

    def complement(self) -> "ArcSet":
        return ArcSet(
            self.points,
            tuple(not x for x in self.point_in),
            tuple(not x for x in self.gap_in),
            not self.full,
        )

    def union(self, other: "ArcSet") -> "ArcSet":
        return self | other

    def intersect(self, other: "ArcSet") -> "ArcSet":
        return self & other

    def interior(self) -> "ArcSet":
        if not self.points:
            return self
        pin = tuple(
            self.point_in[i] and self.gap_in[i] and self.gap_in[i - 1]
            for i in range(len(self.points))
        )
        return ArcSet(self.points, pin, self.gap_in).normalized()

    def closure(self) -> "ArcSet":
        return self.complement().interior().complement()

    def negated(self) -> "ArcSet":
        """Image under the antipodal map ``v -> -v``."""
        if not self.points:
            return self
        k = len(self.points)
        order = sorted(range(k), key=lambda i: angle_key(neg(self.points[i])))
        pts = tuple(neg(self.points[i]) for i in order)
        pin = tuple(self.point_in[i] for i in order)
        gin = tuple(self.gap_in[i] for i in order)
        return ArcSet(pts, pin, gin)

    def arcs(self) -> list[Arc] | None:
        """Maximal arcs in counterclockwise order; ``None`` for the full circle."""
        n = self.normalized()
        if not n.points:
            return None if n.full else []
        k = len(n.points)
        # element 2i is point i, element 2i+1 is gap i
        elems = []
        for i in range(k):
            elems.append(n.point_in[i])
            elems.append(n.gap_in[i])
        m = len(elems)
        first_out = next(j for j in range(m) if not elems[j])
        out = []
        j = first_out
        for step in range(1, m + 1):
            idx = (first_out + step) % m
            if elems[idx] and not elems[(idx - 1) % m]:
                j = idx
                while elems[(j + 1) % m]:
                    j = (j + 1) % m
                out.append(_arc_from_run(n.points, idx, j))
        return out

    def max_gap_at_least_pi(self) -> bool:
        """True iff some maximal arc of the complement has length at least pi."""
        comp = self.complement().arcs()
        return comp is None or any(a.length_at_least_pi() for a in comp)

    def has_arc_at_least_pi(self) -> bool:
        arcs = self.arcs()
        return arcs is None or any(a.length_at_least_pi() for a in arcs)

    def contains_closed_semicircle_in_complement(self) -> bool:
        comp = self.complement().arcs()
        return comp is None or any(a.contains_closed_semicircle() for a in comp)

    def to_json(self):
        arcs = self.arcs()
        return "full" if arcs is None else [a.to_json() for a in arcs]


def _arc_from_run(points: tuple[Vec, ...], first: int, last: int) -> Arc:
    k = len(points)
    if first % 2 == 0:
        start, start_closed = points[first // 2], True
    else:
        start, start_closed = points[first // 2], False
    if last % 2 == 0:
        end, end_closed = points[last // 2], True
    else:
        end, end_closed = points[(last // 2 + 1) % k], False
    return Arc(start, end, start_closed, end_closed)
