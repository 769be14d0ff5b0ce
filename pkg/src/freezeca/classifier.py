"""Criticality of binary freezing monotone rules from their stable directions.

A direction ``v`` is unstable for a neighbor set ``N`` when every ``n`` in
``N`` has ``n.v < 0``; the half-plane configuration that is 1 exactly where
``z.v < 0`` then grows.  The unstable directions of one set form an open arc
of length at most pi, so every question below reduces to exact arc algebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

from . import engine
from .arcs import Arc, ArcSet
from .errors import NotStronglySubcritical, ObstacleVerificationFailed
from .geometry import (
    Vec,
    build_zonotope,
    convex_hull,
    cross,
    dot,
    hull_contains_origin,
    neg,
    primitive,
    rot90,
    rot270,
)
from .rules import NeighborFamily, rule_from_family, split_fg


class Tag(str, Enum):
    STRONGLY_SUBCRITICAL = "StronglySubcritical"
    WEAKLY_SUBCRITICAL = "WeaklySubcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL = "Supercritical"


@dataclass
class Criticality:
    tag: Tag
    stable_set: ArcSet
    strongly_stable_set: ArcSet
    witness: object = None
    unstable_set: ArcSet = field(default_factory=ArcSet.empty)

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, Arc):
            w = {"uncovered_arc": w.to_json()}
        elif w == "full":
            w = {"uncovered_arc": "full"}
        elif w is not None:
            w = {"obstacle": [list(c) for c in sorted(w)]}
        return {
            "tag": self.tag.value,
            "stable_arcs": self.stable_set.to_json(),
            "strongly_stable_arcs": self.strongly_stable_set.to_json(),
            "witness": w,
        }


def _extremes(n_set: Iterable[Vec]) -> tuple[Vec, Vec]:
    """Clockwise-most and counterclockwise-most members of a set inside an open half-plane."""
    pts = list(n_set)
    lo = next(p for p in pts if all(cross(p, q) >= 0 for q in pts))
    hi = next(p for p in pts if all(cross(q, p) >= 0 for q in pts))
    return lo, hi


def unstable_arc(n_set: Iterable[Vec]) -> Arc | None:
    """Open arc of directions ``v`` with ``n.v < 0`` for every ``n``; ``None`` when empty."""
    pts = list(n_set)
    if hull_contains_origin(convex_hull(pts)):
        return None
    lo, hi = _extremes(pts)
    return Arc(primitive(rot90(hi)), primitive(rot270(lo)))


def unstable_set(e: NeighborFamily) -> ArcSet:
    return ArcSet.from_arcs(a for s in e.sets if (a := unstable_arc(s)) is not None)


def is_stable_direction(e: NeighborFamily, v: Vec) -> bool:
    return not any(all(dot(n, v) < 0 for n in s) for s in e.sets)


def halfplane_is_fixed(e: NeighborFamily, v: Vec) -> bool:
    """Decide stability of ``v`` by applying the rule to the half-plane configuration.

    The configuration is invariant along the line ``z.v = 0`` and can only
    change in the strip ``0 <= z.v < r * |v|_1``, so a window covering one
    period of the line and that strip decides the question.
    """
    r = max(e.radius, 1)
    half = r * (abs(v[0]) + abs(v[1])) + max(abs(v[0]), abs(v[1])) + 1
    coords = np.arange(-half - r, half + r + 1)
    xs, ys = np.meshgrid(coords, coords)
    x = (xs * v[0] + ys * v[1] < 0).astype(np.uint8)
    out = rule_from_family(e, radius=r).apply_valid(x)
    return bool((out == x[r:-r, r:-r]).all())


def classify(e: NeighborFamily, with_obstacle: bool = True) -> Criticality:
    unstable = unstable_set(e)
    stable = unstable.complement()
    strong = stable.interior()
    no_f = not split_fg(e).f_sets
    if unstable.is_empty != no_f:
        raise AssertionError("arc test and hull test disagree on strong subcriticality")
    if unstable.is_empty:
        witness = build_obstacle(e) if with_obstacle else None
        return Criticality(Tag.STRONGLY_SUBCRITICAL, stable, strong, witness, unstable)
    if stable.max_gap_at_least_pi():
        arcs = unstable.arcs()
        witness = "full" if arcs is None else next(a for a in arcs if a.length_at_least_pi())
        return Criticality(Tag.SUPERCRITICAL, stable, strong, witness, unstable)
    if not strong.max_gap_at_least_pi():
        return Criticality(Tag.WEAKLY_SUBCRITICAL, stable, strong, None, unstable)
    return Criticality(Tag.CRITICAL, stable, strong, None, unstable)


def obstacle_zonotope(e: NeighborFamily):
    hulls = [convex_hull(s) for s in e.sets]
    dirs = [d for h in hulls for d in h.face_directions()]
    diam = max((h.diameter_sq() for h in hulls), default=1)
    return build_zonotope(dirs, min_face_length_sq=diam)


def verify_obstacle(cells: frozenset, e: NeighborFamily, steps: int = 50, contexts: int = 3,
                    seed: int = 0) -> bool:
    """Fixed-point test plus a simulation in random surroundings."""
    if not cells or not engine.check_fixed_point_family(cells, e):
        return False
    if not e.sets:
        return True
    k = rule_from_family(e)
    margin = k.radius * 2 + 2
    rng = np.random.default_rng(seed)
    for i in range(contexts):
        base = engine.embed(cells, margin)
        ctx = (rng.random(base.cells.shape) < rng.uniform(0.2, 1.0)).astype(np.uint8)
        if i == 0:
            ctx[:] = 1
        w = engine.embed(cells, margin, ctx)
        idx = tuple(np.array([w.index_of(c) for c in sorted(cells)]).T)
        for _ in range(steps):
            w = engine.step(w, k)
            if w.cells[idx].any():
                return False
    return True


def build_obstacle(e: NeighborFamily, seed: int = 0) -> frozenset:
    """Finite set of 0-cells that stays 0 forever inside any surroundings."""
    if split_fg(e).f_sets:
        raise NotStronglySubcritical("some neighbor set has the origin outside its hull")
    cells = frozenset(obstacle_zonotope(e).lattice_points())
    if not verify_obstacle(cells, e, seed=seed):
        raise ObstacleVerificationFailed(f"zonotope obstacle is not fixed for {e.sets}")
    return cells


def dual_noneven_condition(e: NeighborFamily) -> bool:
    return dual_noneven_witness(e) is not None


def dual_noneven_witness(e: NeighborFamily) -> tuple[Vec, Vec] | None:
    """Independent ``(n, m)`` with every set containing ``{n, m}`` or ``{-n, -m}``.

    Only sets whose hull avoids the origin may occur.  Swapping the pair for
    its negation if needed, both vectors can be taken from the first set.
    The empty family (the identity rule) satisfies the condition vacuously.
    """
    if split_fg(e).g_sets:
        return None
    if not e.sets:
        return (1, 0), (0, 1)
    first = sorted(e.sets[0])
    for i, n in enumerate(first):
        for m in first[i + 1 :]:
            if cross(n, m) == 0:
                continue
            pair, anti = {n, m}, {neg(n), neg(m)}
            if all(pair <= s or anti <= s for s in e.sets):
                return n, m
    return None
