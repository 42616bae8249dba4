"""Executable charging argument for scenes in general position.

Every subdivision vertex ``v`` lies on exactly ``d`` hyperplanes.  The
polyhedra of their colors intersect in a polyhedron ``P`` that is simple at
``v``; its ``d`` edges at ``v`` are split into upward and downward ones by a
generic direction ``omega``.  The majority side (``i >= ceil(d/2)`` edges)
spans a unique ``i``-face of ``P`` lying in the flat of the ``d - i``
minority hyperplanes, and ``v`` is its extreme vertex.  Hence ``v`` is
determined by (side, minority hyperplanes, colors of the majority
hyperplanes), and this module checks that encoding is injective.
"""
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .engine import class_cap, vertex_bound, vertices_bruteforce
from .perturb import check_general_position
from .rational import (
    Singular,
    as_vec,
    dot,
    format_rational,
    homogeneous_feasible,
    rank,
    sign,
    solve_square,
)

__all__ = [
    "Charge",
    "NotAVertex",
    "NotSimple",
    "OrthogonalEdge",
    "DegenerateScene",
    "LowestVertexViolation",
    "DimensionMismatch",
    "InjectionViolation",
    "pick_generic_direction",
    "vertex_edges",
    "charge_vertex",
    "verify_charge",
    "verify_injection",
]


class NotAVertex(ValueError):
    pass


class NotSimple(ValueError):
    pass


class OrthogonalEdge(ValueError):
    pass


class DegenerateScene(ValueError):
    pass


class LowestVertexViolation(AssertionError):
    pass


class DimensionMismatch(AssertionError):
    pass


class InjectionViolation(AssertionError):
    pass


@dataclass(frozen=True)
class Charge:
    vertex: tuple
    side: str
    i: int
    hprime: frozenset
    colorset: frozenset
    omega: tuple

    @property
    def code(self):
        return (self.side, tuple(sorted(self.hprime)), tuple(sorted(self.colorset)))


def _through(scene, v):
    return [k for k, h in enumerate(scene.halfspaces) if h.slack(v) == 0]


def _nullspace_vector(rows, d):
    """A nonzero solution of ``rows . u = 0`` when the rows have rank ``d - 1``."""
    for k in range(d):
        unit = [Fraction(int(j == k)) for j in range(d)]
        try:
            return solve_square(list(rows) + [unit], [0] * (d - 1) + [1])
        except Singular:
            continue
    raise NotSimple("edge direction is not determined")


def vertex_edges(scene, v):
    """The ``d`` edges at ``v`` of the polyhedron of the colors through ``v``,
    as ``(hyperplane id, direction)`` pairs; the edge for ``h`` leaves the
    hyperplane of ``h`` and stays on all the others."""
    v = as_vec(v)
    d = scene.dim
    through = _through(scene, v)
    if len(through) > d:
        raise NotSimple(f"{len(through)} hyperplanes through {v}")
    if len(through) < d or rank([scene.halfspaces[k].normal for k in through]) < d:
        raise NotAVertex(f"{v} is not pinned by its hyperplanes")
    colors = {scene.halfspaces[k].color for k in through}
    for k, h in enumerate(scene.halfspaces):
        if h.color in colors and h.slack(v) < 0:
            raise NotAVertex(f"{v} is outside polyhedron {h.color}")
    edges = []
    for k in through:
        others = [scene.halfspaces[j].normal for j in through if j != k]
        u = _nullspace_vector(others, d)
        if dot(scene.halfspaces[k].normal, u) > 0:
            u = tuple(-x for x in u)
        edges.append((k, u))
    return edges


def _moment_directions(d):
    k = 1
    while True:
        for t in (Fraction(1, k), Fraction(k + 1)) if k > 1 else (Fraction(1),):
            yield tuple(t ** j for j in range(d))
        k += 1


def pick_generic_direction(scene, vertices=None, limit=10000):
    """First direction ``(1, t, ..., t^(d-1))`` giving all vertices distinct
    heights and no edge a zero slope."""
    d = scene.dim
    if vertices is None:
        vertices = vertices_bruteforce(scene)
    edges = [u for v in vertices for _, u in vertex_edges(scene, v)]
    for n, omega in enumerate(_moment_directions(d)):
        if n >= limit:
            break
        heights = [dot(omega, v) for v in vertices]
        if len(set(heights)) != len(heights):
            continue
        if any(dot(omega, u) == 0 for u in edges):
            continue
        return omega
    raise RuntimeError("no generic direction found")


def charge_vertex(scene, v, omega):
    v = as_vec(v)
    d = scene.dim
    edges = vertex_edges(scene, v)
    slopes = [sign(dot(omega, u)) for _, u in edges]
    if 0 in slopes:
        raise OrthogonalEdge(f"an edge at {v} is horizontal for {omega}")
    ups = slopes.count(1)
    half = -(-d // 2)
    if ups >= half:
        side, majority = "up", 1
    else:
        side, majority = "down", -1
    i = slopes.count(majority)
    assert i >= half
    hprime = frozenset(k for (k, _), s in zip(edges, slopes) if s != majority)
    colorset = frozenset(scene.halfspaces[k].color for (k, _), s in zip(edges, slopes) if s == majority)
    return Charge(v, side, i, hprime, colorset, tuple(omega))


def _polytope_rows(scene, charge):
    colors = {scene.halfspaces[k].color for k in _through(scene, charge.vertex)}
    return [k for k, h in enumerate(scene.halfspaces) if h.color in colors]


def verify_charge(scene, charge):
    """Rebuild the charged face ``f = F & P`` and check its dimension and that
    the vertex is its strict extreme point in the charged direction."""
    d = scene.dim
    hs = scene.halfspaces
    v, omega = charge.vertex, charge.omega
    hprime = sorted(charge.hprime)
    if len(hprime) != d - charge.i:
        raise DimensionMismatch("wrong number of minority hyperplanes")
    if hprime and rank([hs[k].normal for k in hprime]) != d - charge.i:
        raise DimensionMismatch("minority hyperplanes do not cut out an i-flat")
    edges = vertex_edges(scene, v)
    majority = [u for k, u in edges if k not in charge.hprime]
    if len(majority) != charge.i or (majority and rank(majority) != charge.i):
        raise DimensionMismatch("majority edges do not span an i-face")
    for u in majority:
        if any(dot(hs[k].normal, u) != 0 for k in hprime):
            raise DimensionMismatch("a majority edge leaves the flat")

    rows = _polytope_rows(scene, charge)
    direction = 1 if charge.side == "up" else -1
    # f must not recede in the improving direction
    recedes = homogeneous_feasible(
        equalities=[hs[k].normal for k in hprime],
        nonstrict=[hs[k].normal for k in rows],
        strict=[[direction * x for x in omega]],
    )
    if recedes:
        raise LowestVertexViolation(f"face charged to {v} is unbounded below")
    base = direction * dot(omega, v)
    free = [k for k in rows if k not in charge.hprime]
    seen = False
    for extra in combinations(free, charge.i):
        pick = hprime + list(extra)
        try:
            w = solve_square([hs[k].normal for k in pick], [hs[k].offset for k in pick])
        except Singular:
            continue
        if any(hs[k].slack(w) < 0 for k in rows):
            continue
        if w == v:
            seen = True
            continue
        if direction * dot(omega, w) <= base:
            raise LowestVertexViolation(f"{w} is not above {v} on the charged face")
    if not seen:
        raise LowestVertexViolation(f"{v} is not a vertex of its charged face")
    return {"vertex": [format_rational(x) for x in v], "side": charge.side, "i": charge.i, "ok": True}


@dataclass
class InjectionReport:
    vertices: int
    per_class: list
    injective: bool
    bound: int
    n: int
    m: int

    @property
    def bound_ok(self):
        return self.vertices <= self.bound

    def to_dict(self):
        return {
            "vertices": str(self.vertices),
            "per_class": [
                {"side": s, "i": str(i), "count": str(c), "cap": str(cap)}
                for s, i, c, cap in self.per_class
            ],
            "injective": self.injective,
            "bound": str(self.bound),
            "slack": str(self.bound - self.vertices),
            "bound_ok": self.bound_ok,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def verify_injection(scene, check_faces=True):
    """Charge every vertex, verify each charge, and check the code map is
    injective and within the per-class caps.

    A bounding simplex, if present, is treated as one more polyhedron.
    """
    scene = scene.plain()
    if not check_general_position(scene).ok:
        raise DegenerateScene("scene is not in general position; perturb it first")
    d = scene.dim
    n, m = len(scene.halfspaces), scene.num_colors
    vertices = vertices_bruteforce(scene)
    omega = pick_generic_direction(scene, vertices)
    seen = {}
    tally = Counter()
    for v in vertices:
        ch = charge_vertex(scene, v, omega)
        if check_faces:
            verify_charge(scene, ch)
        if ch.code in seen:
            raise InjectionViolation(f"{seen[ch.code]} and {v} share the code {ch.code}")
        seen[ch.code] = v
        tally[ch.side, ch.i] += 1
    per_class = []
    for side in ("up", "down"):
        for i in range(-(-d // 2), d + 1):
            cap = class_cap(n, m, d, i)
            count = tally[side, i]
            if count > cap:
                raise InjectionViolation(f"class ({side}, {i}) has {count} > {cap} vertices")
            per_class.append((side, i, count, cap))
    return InjectionReport(len(vertices), per_class, True, vertex_bound(n, m, d), n, m)
