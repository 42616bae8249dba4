"""Exact enumeration of the subdivision induced by a colored scene.

Two independent routes are provided:

* :func:`vertices_bruteforce` tests every candidate point (solution of a
  nonsingular ``d``-subset) against the affine hulls of the faces of the
  polyhedra containing it.
* :func:`census` enumerates all faces of the full hyperplane arrangement inside
  the bounding simplex from the local sign fans at its vertices, labels each
  face with its per-color face membership, and merges closure-adjacent faces
  with equal labels using union-find.  Each merged class is one face of the
  induced subdivision.
"""
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb, gcd

from .rational import (
    Singular,
    homogeneous_feasible,
    primitive_row,
    rank,
    solve_square,
)
from .scene import add_bounding_simplex, candidate_vertices, classify

__all__ = [
    "ArrangementFace",
    "Census",
    "BoundReport",
    "DeltaMissing",
    "BoundViolation",
    "vertices_bruteforce",
    "enumerate_arrangement_faces",
    "census",
    "vertex_bound",
    "check_bound",
]


class DeltaMissing(ValueError):
    pass


class BoundViolation(AssertionError):
    pass


@dataclass(frozen=True)
class ArrangementFace:
    sign: tuple
    dim: int


@dataclass
class Census:
    d: int
    n: int
    m: int
    counts: list
    warnings: list = field(default_factory=list)

    @property
    def vertices(self):
        return self.counts[0]

    def to_dict(self):
        report = check_bound(self, self.n, self.m, self.d, strict=False)
        return {
            "d": str(self.d),
            "n": str(self.n),
            "m": str(self.m),
            "counts": [str(c) for c in self.counts],
            "vertices": str(self.vertices),
            "bound": str(report.bound),
            "bound_ok": report.ok,
            "warnings": list(self.warnings),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


# -- brute-force vertex oracle -----------------------------------------------

def _inside_delta(scene, signs):
    return all(signs[i] > 0 for i in scene.delta_ids())


def vertices_bruteforce(scene):
    """0-faces of the induced subdivision, by direct affine-hull tests.

    A candidate ``p`` is a vertex when the tight hyperplanes of the colors whose
    polyhedron contains ``p`` have full rank: the face of each such polyhedron
    containing ``p`` in its relative interior spans exactly the flat of its
    tight hyperplanes.  With a bounding simplex attached, only points strictly
    inside it are reported and the simplex color is ignored.
    """
    d = scene.dim
    hs = scene.halfspaces
    found = []
    for p in candidate_vertices(hs, d):
        signs = classify(scene, p)
        if scene.delta_color is not None and not _inside_delta(scene, signs):
            continue
        normals = []
        for c in scene.colors():
            ids = scene.ids_of_color(c)
            if any(signs[i] < 0 for i in ids):
                continue
            normals.extend(hs[i].normal for i in ids if signs[i] == 0)
        if len(normals) >= d and rank(normals) == d:
            found.append(p)
    return found


# -- arrangement machinery ---------------------------------------------------

def _solve_chunk(args):
    rows, subsets, d = args
    out = []
    for subset in subsets:
        try:
            x = solve_square([rows[k][:d] for k in subset], [rows[k][d] for k in subset])
        except Singular:
            continue
        out.append(x)
    return out


class _Arrangement:
    """Distinct hyperplanes of a scene (with simplex) as primitive integer rows."""

    def __init__(self, scene):
        if scene.delta_color is None:
            raise DeltaMissing("attach a bounding simplex first")
        self.scene = scene
        self.d = d = scene.dim
        self.keys = []
        index = {}
        self.cls = []
        self.orient = []
        for h in scene.halfspaces:
            row = primitive_row(list(h.normal) + [h.offset])
            lead = next(x for x in row[:d] if x)
            o = 1 if lead > 0 else -1
            key = row if o > 0 else tuple(-x for x in row)
            if key not in index:
                index[key] = len(self.keys)
                self.keys.append(key)
            self.cls.append(index[key])
            self.orient.append(o)
        delta = set(scene.delta_ids())
        self.delta_members = [(self.cls[i], self.orient[i]) for i in sorted(delta)]
        self.delta_classes = {self.cls[i] for i in delta}
        self.color_members = []
        for c in scene.colors():
            self.color_members.append([(i, self.cls[i], self.orient[i]) for i in scene.ids_of_color(c)])

    def class_signs(self, point):
        nums, den = point
        out = []
        for key in self.keys:
            v = key[-1] * den - sum(a * x for a, x in zip(key, nums))
            out.append((v > 0) - (v < 0))
        return out

    def halfspace_signs(self, csigns):
        return tuple(o * csigns[c] for c, o in zip(self.cls, self.orient))

    def vertices(self, workers=1):
        """Arrangement vertices in the closed simplex, as ``(numerators, den)``."""
        d = self.d
        subsets = list(combinations(range(len(self.keys)), d))
        if workers > 1 and len(subsets) > 2000:
            size = -(-len(subsets) // (4 * workers))
            chunks = [(self.keys, subsets[i:i + size], d) for i in range(0, len(subsets), size)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                solved = [x for part in pool.map(_solve_chunk, chunks) for x in part]
        else:
            solved = _solve_chunk((self.keys, subsets, d))
        points = {}
        for x in set(solved):
            den = 1
            for v in x:
                den = den * v.denominator // gcd(den, v.denominator)
            pt = (tuple(v.numerator * (den // v.denominator) for v in x), den)
            cs = self.class_signs(pt)
            if all(o * cs[c] >= 0 for c, o in self.delta_members):
                points[pt] = cs
        return sorted(points.items())

    def label(self, csigns):
        out = []
        for members in self.color_members:
            tight = []
            for i, c, o in members:
                s = o * csigns[c]
                if s < 0:
                    tight = None
                    break
                if s == 0:
                    tight.append(i)
            out.append(None if tight is None else tuple(tight))
        return tuple(out)


def _local_fan(arr, through, allowed):
    """Feasible local sign patterns at a vertex.

    ``through`` lists the hyperplane classes containing the vertex; the class
    sign in direction ``u`` is ``sign(-a . u)``.  Returns ``(pattern, dim)``
    pairs; ``independent`` tells whether the classes are linearly independent.
    """
    d = arr.d
    normals = [arr.keys[c][:d] for c in through]
    choices = [allowed(c) for c in through]
    if len(through) == d:
        return [(pat, d - pat.count(0)) for pat in product(*choices)], True

    rank_cache = {}

    def face_dim(pat):
        zeros = tuple(k for k, s in enumerate(pat) if s == 0)
        if zeros not in rank_cache:
            rank_cache[zeros] = d - rank([normals[k] for k in zeros]) if zeros else d
        return rank_cache[zeros]

    out = []

    def extend(prefix, eqs, strict):
        k = len(prefix)
        if k == len(through):
            out.append((tuple(prefix), face_dim(prefix)))
            return
        a = normals[k]
        for s in choices[k]:
            if s == 0:
                e2, s2 = eqs + [a], strict
            elif s > 0:
                e2, s2 = eqs, strict + [a]  # -a.u > 0  <=>  a.u < 0
            else:
                e2, s2 = eqs, strict + [[-x for x in a]]
            if homogeneous_feasible(equalities=e2, strict=s2):
                extend(prefix + [s], e2, s2)

    extend([], [], [])
    return out, False


class _UnionFind:
    def __init__(self):
        self.parent = []

    def add(self):
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                ra, rb = rb, ra
            self.parent[ra] = rb


def _with_delta(scene):
    return scene if scene.delta_color is not None else add_bounding_simplex(scene)


def _build(scene, include_delta_boundary=False, workers=1, merge=True):
    """Shared driver for face enumeration and the census."""
    arr = _Arrangement(scene)
    delta_classes = arr.delta_classes
    inner = {1} if not include_delta_boundary else {0, 1}
    delta_orient = dict(arr.delta_members)

    def allowed(c):
        if c in delta_orient:
            return tuple(s for s in (-1, 0, 1) if s * delta_orient[c] in inner)
        return (-1, 0, 1)

    def kept(csigns):
        return all(o * csigns[c] in inner for c, o in arr.delta_members)

    face_index = {}
    faces = []          # (class sign tuple, dim)
    labels = []
    clipped = []
    uf = _UnionFind()

    def intern(cs, dim, on_boundary):
        idx = face_index.get(cs)
        if idx is None:
            idx = len(faces)
            face_index[cs] = idx
            faces.append((cs, dim))
            labels.append(arr.label(cs) if merge else None)
            clipped.append(on_boundary)
            uf.add()
        elif on_boundary:
            clipped[idx] = True
        return idx

    for _, base in arr.vertices(workers):
        through = [c for c, s in enumerate(base) if s == 0]
        on_boundary = any(base[c] == 0 for c in delta_classes)
        fan, independent = _local_fan(arr, through, allowed)
        local = {}
        for pat, dim in fan:
            cs = list(base)
            for c, s in zip(through, pat):
                cs[c] = s
            cs = tuple(cs)
            if not kept(cs):
                continue
            local[pat] = intern(cs, dim, on_boundary)
        if not merge:
            continue
        if independent:
            for pat, idx in local.items():
                for k, s in enumerate(pat):
                    if s:
                        continue
                    for t in (-1, 1):
                        up = local.get(pat[:k] + (t,) + pat[k + 1:])
                        if up is not None and labels[up] == labels[idx]:
                            uf.union(idx, up)
        else:
            items = [(pat, idx, faces[idx][1]) for pat, idx in local.items()]
            for pat, idx, dim in items:
                for pat2, idx2, dim2 in items:
                    if dim2 != dim + 1 or labels[idx] != labels[idx2]:
                        continue
                    if all(s == 0 or s == t for s, t in zip(pat, pat2)):
                        uf.union(idx, idx2)
    return arr, faces, labels, uf, clipped


def enumerate_arrangement_faces(scene, include_delta_boundary=False, workers=1):
    """All faces of the hyperplane arrangement inside the bounding simplex,
    keyed by their sign vector over the scene's halfspaces."""
    arr, faces, _, _, _ = _build(scene, include_delta_boundary, workers, merge=False)
    out = [ArrangementFace(arr.halfspace_signs(cs), dim) for cs, dim in faces]
    out.sort(key=lambda f: (f.dim, f.sign))
    return out


def census(scene, include_delta_boundary=False, workers=1):
    """Face counts of the induced subdivision by dimension.

    Unbounded faces are represented by their part inside the bounding simplex
    and counted once; faces on the simplex boundary are dropped unless
    ``include_delta_boundary`` is set.
    """
    scene = _with_delta(scene)
    d = scene.dim
    arr, faces, labels, uf, clipped = _build(scene, include_delta_boundary, workers)
    top = {}
    touches = {}
    for idx, (_, dim) in enumerate(faces):
        root = uf.find(idx)
        top[root] = max(top.get(root, -1), dim)
        touches[root] = touches.get(root, False) or clipped[idx]
    counts = [0] * (d + 1)
    for root, dim in top.items():
        counts[dim] += 1
    warnings = []
    for k, c in enumerate(scene.colors()):
        if not scene.ids_of_color(c):
            warnings.append(f"color {c} has no halfspaces (whole space)")
        elif not any(lab[k] is not None for lab in labels):
            warnings.append(f"color {c} is empty")
    unbounded = sum(1 for v in touches.values() if v)
    if unbounded:
        warnings.append(f"{unbounded} unbounded faces counted via clipped representatives")
    return Census(d, scene.n, scene.m, counts, warnings)


# -- explicit bound ----------------------------------------------------------

@dataclass
class BoundReport:
    vertices: int
    bound: int
    ok: bool

    @property
    def slack(self):
        return self.bound - self.vertices


def class_cap(n, m, d, i):
    """Number of codes (d-i hyperplanes, at most i colors) for one side."""
    return comb(n, d - i) * sum(comb(m, j) for j in range(min(i, m) + 1))


def vertex_bound(n, m, d):
    """``2 * sum_{i >= ceil(d/2)} C(n, d-i) * sum_{j <= min(i, m)} C(m, j)``."""
    return 2 * sum(class_cap(n, m, d, i) for i in range(-(-d // 2), d + 1))


def check_bound(census_or_vertices, n, m, d, strict=True):
    vertices = getattr(census_or_vertices, "vertices", census_or_vertices)
    bound = vertex_bound(n, m, d)
    report = BoundReport(vertices, bound, vertices <= bound)
    if strict and not report.ok:
        raise BoundViolation(f"{vertices} vertices exceed the bound {bound}")
    return report
