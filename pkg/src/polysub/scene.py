"""Colored halfspace scenes.

A scene is a list of closed halfspaces ``normal . x <= offset``, each tagged
with a color; color ``c`` stands for the polyhedron cut out by its halfspaces.
The list index of a halfspace is its stable hyperplane id.
"""
from collections import namedtuple
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations

from .rational import (
    Singular,
    as_vec,
    dot,
    format_rational,
    parse_rational,
    rank,
    sign,
    solve_square,
)

__all__ = [
    "Halfspace",
    "Scene",
    "ParseError",
    "Membership",
    "classify",
    "color_membership",
    "candidate_vertices",
    "add_bounding_simplex",
    "delta_vertices",
    "read_scene",
    "write_scene",
    "load_scene",
    "save_scene",
    "export_hrep",
]


class ParseError(ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Halfspace:
    normal: tuple
    offset: Fraction
    color: int = 0

    def __post_init__(self):
        object.__setattr__(self, "normal", as_vec(self.normal))
        object.__setattr__(self, "offset", Fraction(self.offset))
        if not any(self.normal):
            raise ValueError("halfspace normal must be nonzero")

    def slack(self, p):
        """``offset - normal . p``: positive inside, zero on the hyperplane."""
        return self.offset - dot(self.normal, p)


@dataclass(frozen=True)
class Scene:
    dim: int
    halfspaces: tuple = ()
    num_colors: int = 1
    delta_color: int = None

    def __post_init__(self):
        object.__setattr__(self, "halfspaces", tuple(self.halfspaces))
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        if self.num_colors < 1:
            raise ValueError("need at least one color")
        for h in self.halfspaces:
            if len(h.normal) != self.dim:
                raise ValueError(f"halfspace {h} does not live in dimension {self.dim}")
            if not 0 <= h.color < self.num_colors:
                raise ValueError(f"color {h.color} out of range")
        if self.delta_color is not None:
            if not 0 <= self.delta_color < self.num_colors:
                raise ValueError("delta color out of range")
            count = sum(1 for h in self.halfspaces if h.color == self.delta_color)
            if count != self.dim + 1:
                raise ValueError(f"bounding simplex needs {self.dim + 1} halfspaces, got {count}")

    def __len__(self):
        return len(self.halfspaces)

    @property
    def n(self):
        """Number of halfspaces, not counting the bounding simplex."""
        return len(self.user_ids())

    @property
    def m(self):
        return self.num_colors - (self.delta_color is not None)

    def colors(self):
        """Colors of the user polyhedra (the simplex color excluded)."""
        return [c for c in range(self.num_colors) if c != self.delta_color]

    def ids_of_color(self, c):
        return [i for i, h in enumerate(self.halfspaces) if h.color == c]

    def user_ids(self):
        return [i for i, h in enumerate(self.halfspaces) if h.color != self.delta_color]

    def delta_ids(self):
        if self.delta_color is None:
            return []
        return self.ids_of_color(self.delta_color)

    def plain(self):
        """The same halfspaces with the simplex treated as an ordinary color."""
        return replace(self, delta_color=None)

    def without_delta(self):
        if self.delta_color is None:
            return self
        keep = []
        for h in self.halfspaces:
            if h.color == self.delta_color:
                continue
            c = h.color - (h.color > self.delta_color)
            keep.append(Halfspace(h.normal, h.offset, c))
        return Scene(self.dim, keep, max(self.num_colors - 1, 1))

    def with_delta_of(self, other):
        """Attach ``other``'s bounding simplex (same color id) to this scene."""
        if self.delta_color is not None:
            return self
        if other.delta_color is None:
            raise ValueError("other scene has no bounding simplex")
        if other.delta_color < self.num_colors:
            raise ValueError("simplex color collides with a scene color")
        extra = [other.halfspaces[i] for i in other.delta_ids()]
        return Scene(self.dim, self.halfspaces + tuple(extra), other.delta_color + 1, other.delta_color)


Membership = namedtuple("Membership", "status tight")


def classify(scene, p):
    """Sign vector of ``p``: +1 strictly inside, 0 on the hyperplane, -1 outside."""
    p = as_vec(p)
    return tuple(sign(h.slack(p)) for h in scene.halfspaces)


def color_membership(scene, p, c):
    """``Membership("outside" | "boundary" | "interior", tight ids)``."""
    if not 0 <= c < scene.num_colors:
        raise ValueError(f"no color {c}")
    p = as_vec(p)
    tight = []
    for i in scene.ids_of_color(c):
        s = sign(scene.halfspaces[i].slack(p))
        if s < 0:
            return Membership("outside", frozenset())
        if s == 0:
            tight.append(i)
    if tight:
        return Membership("boundary", frozenset(tight))
    return Membership("interior", frozenset())


def candidate_vertices(halfspaces, dim):
    """Solutions of all nonsingular ``dim``-subsets of bounding hyperplanes."""
    found = set()
    for subset in combinations(halfspaces, dim):
        try:
            found.add(solve_square([h.normal for h in subset], [h.offset for h in subset]))
        except Singular:
            pass
    return sorted(found)


def _box_radius(scene):
    hs = list(scene.halfspaces)
    points = candidate_vertices(hs, scene.dim)
    if hs and rank([h.normal for h in hs]) < scene.dim:
        # no vertices pin the flats; pin them with the coordinate hyperplanes
        axes = [Halfspace([int(i == k) for i in range(scene.dim)], 0) for k in range(scene.dim)]
        points = candidate_vertices(hs + axes, scene.dim)
    biggest = max((abs(x) for p in points for x in p), default=Fraction(0))
    return 1 + biggest if points else Fraction(1)


def add_bounding_simplex(scene):
    """Append a simplex of a fresh color containing every candidate vertex
    (and the closed ball and cube of radius ``d*R`` around the origin) in its
    interior: ``-x_i <= (d+1)*R`` and ``sum(x) <= d*(d+1)*R``."""
    if scene.delta_color is not None:
        raise ValueError("scene already has a bounding simplex")
    d = scene.dim
    R = _box_radius(scene)
    c = scene.num_colors
    extra = [Halfspace([-int(i == k) for i in range(d)], (d + 1) * R, c) for k in range(d)]
    extra.append(Halfspace([1] * d, d * (d + 1) * R, c))
    return Scene(d, scene.halfspaces + tuple(extra), c + 1, c)


def delta_vertices(scene):
    hs = [scene.halfspaces[i] for i in scene.delta_ids()]
    return candidate_vertices(hs, scene.dim)


# -- text formats -------------------------------------------------------------

def read_scene(text):
    dim = colors = delta = None
    halfspaces = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        try:
            if key == "dim" and dim is None and len(rest) == 1:
                dim = int(rest[0])
            elif key == "colors" and colors is None and len(rest) == 1:
                colors = int(rest[0])
            elif key == "delta" and delta is None and len(rest) == 1:
                delta = int(rest[0])
            elif key == "h":
                if dim is None or colors is None:
                    raise ParseError(lineno, "'dim' and 'colors' must precede halfspaces")
                if len(rest) != dim + 2:
                    raise ParseError(lineno, f"expected color, {dim} coefficients and an offset")
                color = int(rest[0])
                if not 0 <= color < colors:
                    raise ParseError(lineno, f"color {color} out of range (colors {colors})")
                values = [parse_rational(t) for t in rest[1:]]
                halfspaces.append(Halfspace(values[:-1], values[-1], color))
            else:
                raise ParseError(lineno, f"unexpected line {raw!r}")
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None
    if dim is None or colors is None:
        raise ParseError(0, "missing 'dim' or 'colors' header")
    try:
        return Scene(dim, halfspaces, colors, delta)
    except ValueError as exc:
        raise ParseError(0, str(exc)) from None


def write_scene(scene):
    lines = [f"dim {scene.dim}", f"colors {scene.num_colors}"]
    if scene.delta_color is not None:
        lines.append(f"delta {scene.delta_color}")
    for h in scene.halfspaces:
        coeffs = " ".join(format_rational(x) for x in h.normal)
        lines.append(f"h {h.color} {coeffs} {format_rational(h.offset)}")
    return "\n".join(lines) + "\n"


def load_scene(path):
    with open(path, encoding="utf-8") as fh:
        return read_scene(fh.read())


def save_scene(scene, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_scene(scene))


def export_hrep(scene, c):
    """Color ``c`` as an H-representation block, rows ``b -a_1 ... -a_d``."""
    if not 0 <= c < scene.num_colors:
        raise ValueError(f"no color {c}")
    rows = [scene.halfspaces[i] for i in scene.ids_of_color(c)]
    out = ["H-representation", "begin", f"{len(rows)} {scene.dim + 1} rational"]
    for h in rows:
        out.append(" ".join([format_rational(h.offset)] + [format_rational(-a) for a in h.normal]))
    out.append("end")
    return "\n".join(out) + "\n"
