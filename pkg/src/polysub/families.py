"""Lower-bound families: interleaved tangent polygons, their products and
graded intervals, all with rational coordinates.

Exact rotations by ``2*pi/(ell*m)`` have irrational coordinates, so the
tangent directions are rational points of the unit circle,
``((1-t^2)/(1+t^2), 2t/(1+t^2))``, with ``t`` a rational approximation of the
half-angle tangent.  Only the cyclic order of the directions matters: if the
directions of every two colors strictly alternate around the circle, each edge
of one polygon has both endpoints outside the other polygon and its point of
tangency inside it, so every pair of boundaries crosses in exactly ``2*ell``
points.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian

from .rational import rank
from .scene import Halfspace, Scene, classify

__all__ = [
    "ColorMismatch",
    "CirclePoint",
    "FamilyParams",
    "PredictedCounts",
    "rational_circle_points",
    "rotated_polygon_scene",
    "product_scene",
    "interval_scene",
    "gen_extremal",
    "product_vertex_count",
]


class ColorMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CirclePoint:
    u: tuple
    t: Fraction  # None stands for t = infinity, i.e. u = (-1, 0)

    @classmethod
    def from_parameter(cls, t):
        if t is None:
            return cls((Fraction(-1), Fraction(0)), None)
        t = Fraction(t)
        q = 1 + t * t
        return cls(((1 - t * t) / q, 2 * t / q), t)


@dataclass(frozen=True)
class FamilyParams:
    d: int
    m: int
    ell: int

    def __post_init__(self):
        if self.d < 2 or self.m < 1 or self.ell < 3:
            raise ValueError("need d >= 2, m >= 1, ell >= 3")

    @property
    def s(self):
        return self.d // 2

    @property
    def odd(self):
        return self.d % 2 == 1


@dataclass(frozen=True)
class PredictedCounts:
    facets: int
    vertices: int

    @classmethod
    def for_params(cls, params):
        s, m, ell = params.s, params.m, params.ell
        if params.odd:
            return cls(m * (s * ell + 2), 2 * m * (ell * m * m) ** s)
        return cls(s * m * ell, (ell * m * m) ** s)


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _upper(u):
    return u[1] > 0 or (u[1] == 0 and u[0] > 0)


def _strict_cycle(points):
    """Strictly increasing angles around the circle, winding exactly once,
    with every consecutive gap below pi."""
    k = len(points)
    if any(_cross(points[i], points[(i + 1) % k]) <= 0 for i in range(k)):
        return False
    wraps = sum(
        1 for i in range(k) if not _upper(points[i]) and _upper(points[(i + 1) % k])
    )
    return wraps == 1


def rational_circle_points(K, precision=None):
    """``K`` rational unit vectors near the angles ``2*pi*k/K`` in strict
    counter-clockwise order.  ``precision`` bounds the denominators of the
    half-angle parameters (default ``64*K``)."""
    if K < 3:
        raise ValueError("need at least 3 directions")
    precision = precision or 64 * K
    while True:
        pts = []
        for k in range(K):
            if 2 * k == K:
                pts.append(CirclePoint.from_parameter(None))
                continue
            theta = 2 * math.pi * k / K
            if 2 * k > K:
                theta -= 2 * math.pi
            t = Fraction(math.tan(theta / 2)).limit_denominator(precision)
            pts.append(CirclePoint.from_parameter(t))
        if len({p.u for p in pts}) == K and _strict_cycle([p.u for p in pts]):
            return pts
        precision *= 4


def _polygon_scene(ell, m, precision):
    pts = rational_circle_points(ell * m, precision)
    hs = [Halfspace(p.u, 1, k % m) for k, p in enumerate(pts)]
    scene = Scene(2, hs, m)
    for c in range(m):
        own = [p.u for p in pts[c::m]]
        if not _strict_cycle(own):
            raise ArithmeticError("polygon directions leave a gap of pi or more")
    return scene, pts


def rotated_polygon_scene(ell, m, precision=None):
    """``ell*m`` tangent halfspaces ``u_k . x <= 1``, halfspace ``k`` colored
    ``k mod m``; color ``i`` is an ``ell``-gon circumscribing the unit circle."""
    if ell < 3 or m < 1:
        raise ValueError("need ell >= 3 and m >= 1")
    from .perturb import check_general_position

    precision = precision or 64 * ell * m
    while True:
        scene, _ = _polygon_scene(ell, m, precision)
        if check_general_position(scene).ok:
            return scene
        precision *= 4


def product_scene(first, second):
    """Color-by-color product: color ``c`` becomes ``P_c x Q_c``."""
    if first.num_colors != second.num_colors:
        raise ColorMismatch(f"{first.num_colors} colors vs {second.num_colors}")
    if first.delta_color is not None or second.delta_color is not None:
        raise ValueError("products of scenes with a bounding simplex are not defined")
    p, q = first.dim, second.dim
    zp, zq = (0,) * p, (0,) * q
    hs = [Halfspace(h.normal + zq, h.offset, h.color) for h in first.halfspaces]
    hs += [Halfspace(zp + h.normal, h.offset, h.color) for h in second.halfspaces]
    return Scene(p + q, hs, first.num_colors)


def interval_scene(m):
    """Color ``i`` is the interval ``[-1-i, 1+i]``."""
    if m < 1:
        raise ValueError("need m >= 1")
    hs = []
    for i in range(m):
        hs.append(Halfspace([1], 1 + i, i))
        hs.append(Halfspace([-1], 1 + i, i))
    return Scene(1, hs, m)


def gen_extremal(d, m, ell):
    """The lower-bound family in dimension ``d``: the ``s``-fold product of the
    interleaved polygons (times the graded intervals when ``d`` is odd)."""
    params = FamilyParams(d, m, ell)
    polygons = rotated_polygon_scene(ell, m)
    scene = polygons
    for _ in range(params.s - 1):
        scene = product_scene(scene, polygons)
    if params.odd:
        scene = product_scene(scene, interval_scene(m))
    return scene, PredictedCounts.for_params(params)


# -- exact product law -------------------------------------------------------

def _vertex_data(scene):
    """For each subdivision vertex: colors containing it and, per color, the
    tight normals there."""
    from .engine import vertices_bruteforce

    out = []
    for p in vertices_bruteforce(scene):
        signs = classify(scene, p)
        tight = {}
        for c in range(scene.num_colors):
            ids = scene.ids_of_color(c)
            if all(signs[i] >= 0 for i in ids):
                tight[c] = [scene.halfspaces[i].normal for i in ids if signs[i] == 0]
        out.append(tight)
    return out


def product_vertex_count(*factors):
    """Vertices of the subdivision of the color-by-color product, from the
    factors' vertices alone.

    A tuple of factor vertices is a product vertex exactly when the colors
    containing every coordinate still pin each coordinate to a point.  When
    every factor vertex lies in every polyhedron this is the plain product of
    the factor vertex counts; in general it is smaller.
    """
    data = [_vertex_data(f) for f in factors]
    dims = [f.dim for f in factors]
    pinned = {}

    def pins(k, j, colors):
        key = (k, j, colors)
        if key not in pinned:
            normals = [a for c in colors for a in data[k][j][c]]
            pinned[key] = len(normals) >= dims[k] and rank(normals) == dims[k]
        return pinned[key]

    total = 0
    for combo in cartesian(*[range(len(d)) for d in data]):
        common = set.intersection(*[set(data[k][j]) for k, j in enumerate(combo)])
        colors = frozenset(common)
        if colors and all(pins(k, j, colors) for k, j in enumerate(combo)):
            total += 1
    return total
